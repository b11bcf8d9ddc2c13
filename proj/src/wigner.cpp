#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>

#include "owrte/common.hpp"
#include "owrte/transport.hpp"

namespace owrte {

namespace {

struct FftwRealDeleter {
  void operator()(double* p) const { fftw_free(p); }
};
struct FftwComplexDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

using RealBuf = std::unique_ptr<double[], FftwRealDeleter>;
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwComplexDeleter>;
using Plan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

bool grids_match(const AngularGrid& a, const AngularGrid& b) {
  if (&a == &b) return true;
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.nodes[i] != b.nodes[i] || a.weights[i] != b.weights[i]) return false;
  }
  return true;
}

}  // namespace

double WignerField::cell_volume() const {
  require(static_cast<bool>(grid), ErrorCode::invalid_argument,
          "wigner field has no grid");
  double vol = box[0] / cells[0];
  if (grid->d == 2) vol *= box[1] / cells[1];
  return vol;
}

double WignerField::x_coord(int axis, int index) const {
  require(axis >= 0 && axis < grid->d, ErrorCode::invalid_argument,
          "axis out of range");
  require(index >= 0 && index < cells[axis], ErrorCode::invalid_argument,
          "cell index out of range");
  const double h = box[axis] / cells[axis];
  return -0.5 * box[axis] + (index + 0.5) * h;
}

double WignerField::total() const {
  const int nc = spatial_cells();
  double sum = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    sum += grid->weights[i] *
           values.segment(static_cast<Eigen::Index>(i) * nc, nc).sum();
  }
  return sum * cell_volume();
}

IntensityField WignerField::marginal_kappa() const {
  const int nc = spatial_cells();
  IntensityField field;
  field.grid = grid;
  field.z = z;
  field.values.resize(static_cast<Eigen::Index>(grid->size()));
  for (std::size_t i = 0; i < grid->size(); ++i) {
    field.values[static_cast<Eigen::Index>(i)] =
        cell_volume() *
        values.segment(static_cast<Eigen::Index>(i) * nc, nc).sum();
  }
  return field;
}

double& WignerField::at(std::size_t node, int ix, int iy) {
  require(node < grid->size() && ix >= 0 && ix < cells[0] && iy >= 0 &&
              iy < std::max(cells[1], 1),
          ErrorCode::invalid_argument, "wigner index out of range");
  return values[static_cast<Eigen::Index>(node) * spatial_cells() +
                iy * cells[0] + ix];
}

double WignerField::at(std::size_t node, int ix, int iy) const {
  return const_cast<WignerField*>(this)->at(node, ix, iy);
}

WignerField make_wigner_field(std::shared_ptr<const AngularGrid> grid,
                              std::array<double, 2> box,
                              std::array<int, 2> cells) {
  require(static_cast<bool>(grid), ErrorCode::invalid_argument, "grid is null");
  WignerField field;
  field.grid = std::move(grid);
  const int d = field.grid->d;
  require(cells[0] >= 2 && box[0] > 0.0 && std::isfinite(box[0]),
          ErrorCode::invalid_argument,
          "x box must be positive with at least 2 cells");
  if (d == 2) {
    require(cells[1] >= 2 && box[1] > 0.0 && std::isfinite(box[1]),
            ErrorCode::invalid_argument,
            "y box must be positive with at least 2 cells");
  } else {
    require(cells[1] <= 1, ErrorCode::invalid_argument,
            "d = 1 fields have no y cells");
    cells[1] = 1;
    box[1] = 0.0;
  }
  field.box = box;
  field.cells = cells;
  field.values = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(field.grid->size()) * field.spatial_cells());
  return field;
}

namespace {

// Spectral shift table: one factor per retained mode and kappa node, moving
// each W(kappa_i, .) by velocity * dz along the characteristics.
class ShiftTable {
 public:
  ShiftTable(const WignerField& proto, const std::vector<Vec>& velocity,
             double dz)
      : n_nodes_(static_cast<int>(velocity.size())) {
    const int d = proto.grid->d;
    const int nx = proto.cells[0];
    const int ny = std::max(proto.cells[1], 1);
    ncx_ = nx / 2 + 1;
    n_modes_ = ny * ncx_;
    factors_.resize(static_cast<std::size_t>(n_nodes_) * n_modes_);
    const double lx = proto.box[0];
    const double ly = proto.box[1];
    for (int i = 0; i < n_nodes_; ++i) {
      const Vec shift = velocity[static_cast<std::size_t>(i)] * dz;
      for (int iy = 0; iy < ny; ++iy) {
        const int fy = (iy <= ny / 2) ? iy : iy - ny;
        const double ky = (d == 2) ? two_pi * fy / ly : 0.0;
        const bool y_self = (d == 1) || fy == 0 || (ny % 2 == 0 && iy == ny / 2);
        for (int mx = 0; mx < ncx_; ++mx) {
          const double kx = two_pi * mx / lx;
          const double theta = kx * shift.x() + ky * shift.y();
          const bool x_self = mx == 0 || (nx % 2 == 0 && mx == nx / 2);
          // Self-conjugate bins must stay real; the grid-exact shift of the
          // Nyquist component is the cosine factor.
          factors_[static_cast<std::size_t>(i) * n_modes_ + iy * ncx_ + mx] =
              (x_self && y_self)
                  ? std::complex<double>(std::cos(theta), 0.0)
                  : std::exp(std::complex<double>(0.0, -theta));
        }
      }
    }
  }

  void apply(fftw_complex* spec) const {
    for (int i = 0; i < n_nodes_; ++i) {
      const std::complex<double>* f = factors_.data() +
                                      static_cast<std::size_t>(i) * n_modes_;
      fftw_complex* row = spec + static_cast<std::size_t>(i) * n_modes_;
      for (int m = 0; m < n_modes_; ++m) {
        const std::complex<double> v(row[m][0], row[m][1]);
        const std::complex<double> out = v * f[m];
        row[m][0] = out.real();
        row[m][1] = out.imag();
      }
    }
  }

 private:
  int n_nodes_;
  int ncx_ = 0;
  int n_modes_ = 0;
  std::vector<std::complex<double>> factors_;
};

}  // namespace

std::vector<WignerField> solve_wigner(const CrossSectionTable& table,
                                      const WignerField& w0,
                                      const std::vector<double>& z_targets,
                                      const WignerOptions& options) {
  require(static_cast<bool>(w0.grid) && grids_match(*w0.grid, *table.grid),
          ErrorCode::config, "wigner field grid does not match the table grid");
  const auto n_nodes = static_cast<int>(table.size());
  const int nc = w0.spatial_cells();
  require(w0.values.size() == static_cast<Eigen::Index>(n_nodes) * nc,
          ErrorCode::invalid_argument, "wigner values size mismatch");
  require(!z_targets.empty(), ErrorCode::invalid_argument, "z_targets empty");
  double prev = w0.z;
  for (double zt : z_targets) {
    require(std::isfinite(zt) && zt >= prev, ErrorCode::invalid_argument,
            "z_targets must be non-decreasing and start at or after w0.z");
    prev = zt;
  }
  require(options.steps_per_mfp >= 1, ErrorCode::invalid_argument,
          "steps_per_mfp must be >= 1");
  require(options.negative_tol > 0.0, ErrorCode::invalid_argument,
          "negative_tol must be positive");

  const double w0max = std::max(w0.values.maxCoeff(), 0.0);
  require(w0.values.minCoeff() >= -options.negative_tol * w0max,
          ErrorCode::invalid_argument, "initial wigner field is negative");

  const int d = w0.grid->d;
  const int nx = w0.cells[0];
  const int ny = std::max(w0.cells[1], 1);
  const int ncx = nx / 2 + 1;
  const int n_modes = ny * ncx;

  // Scratch: node-major real field and its half-spectrum.
  RealBuf rbuf(fftw_alloc_real(static_cast<std::size_t>(n_nodes) * nc));
  ComplexBuf cbuf(
      fftw_alloc_complex(static_cast<std::size_t>(n_nodes) * n_modes));
  require(rbuf && cbuf, ErrorCode::io, "fftw allocation failed");

  int dims[2] = {ny, nx};  // row-major, x contiguous
  const int rank = (d == 2) ? 2 : 1;
  int* dim_ptr = (d == 2) ? dims : dims + 1;
  Plan forward(fftw_plan_many_dft_r2c(rank, dim_ptr, n_nodes, rbuf.get(),
                                      nullptr, 1, nc, cbuf.get(), nullptr, 1,
                                      n_modes, FFTW_ESTIMATE));
  Plan backward(fftw_plan_many_dft_c2r(rank, dim_ptr, n_nodes, cbuf.get(),
                                       nullptr, 1, n_modes, rbuf.get(), nullptr,
                                       1, nc, FFTW_ESTIMATE));
  require(forward && backward, ErrorCode::io, "fftw planning failed");

  std::vector<Vec> velocity(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    velocity[idx] = table.grid->nodes[idx] / table.grid->beta_at(idx);
  }

  using RowMat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMat> state(rbuf.get(), n_nodes, nc);
  for (int i = 0; i < n_nodes; ++i) {
    state.row(i) = w0.values.segment(static_cast<Eigen::Index>(i) * nc, nc);
  }

  Eigen::VectorXd w(n_nodes);
  for (int j = 0; j < n_nodes; ++j) w[j] = table.grid->weights[j];
  RowMat k1(n_nodes, nc), k2(n_nodes, nc), k3(n_nodes, nc), k4(n_nodes, nc),
      tmp(n_nodes, nc);
  const auto rhs = [&](const RowMat& y, RowMat& out) {
    out.noalias() = table.q_matrix * (w.asDiagonal() * y);
    out -= table.sigma.asDiagonal() * y;
  };

  const double h_base = table.min_mfp() / options.steps_per_mfp;
  const double scale = 1.0 / nc;

  const auto advect = [&](const ShiftTable& shifts) {
    fftw_execute(forward.get());
    shifts.apply(cbuf.get());
    fftw_execute(backward.get());
    state *= scale;
  };

  std::vector<WignerField> out;
  out.reserve(z_targets.size());
  double z = w0.z;
  for (double zt : z_targets) {
    const double length = zt - z;
    if (length > 0.0) {
      const auto n_steps =
          std::max(1L, static_cast<long>(std::ceil(length / h_base - 1e-9)));
      require(n_steps < 1000000000L, ErrorCode::range,
              "step-size underflow: segment needs too many steps");
      const double h = length / static_cast<double>(n_steps);
      const ShiftTable half_shift(w0, velocity, 0.5 * h);
      for (long s = 0; s < n_steps; ++s) {
        advect(half_shift);
        rhs(state, k1);
        tmp = state + 0.5 * h * k1;
        rhs(tmp, k2);
        tmp = state + 0.5 * h * k2;
        rhs(tmp, k3);
        tmp = state + h * k3;
        rhs(tmp, k4);
        state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        advect(half_shift);

        const double vmax = std::max(state.maxCoeff(), 0.0);
        require(state.minCoeff() >= -options.negative_tol * vmax,
                ErrorCode::instability,
                "wigner field went negative beyond the splitting transient");
      }
      z = zt;
    }
    WignerField field;
    field.grid = w0.grid;
    field.box = w0.box;
    field.cells = w0.cells;
    field.z = zt;
    field.values.resize(static_cast<Eigen::Index>(n_nodes) * nc);
    for (int i = 0; i < n_nodes; ++i) {
      field.values.segment(static_cast<Eigen::Index>(i) * nc, nc) =
          state.row(i);
    }
    field.values = field.values.cwiseMax(0.0);
    out.push_back(std::move(field));
  }
  return out;
}

}  // namespace owrte
