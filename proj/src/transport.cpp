#include "owrte/transport.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "owrte/common.hpp"

namespace owrte {

namespace {

Eigen::Map<const Eigen::VectorXd> weights_of(const AngularGrid& grid) {
  return {grid.weights.data(), static_cast<Eigen::Index>(grid.weights.size())};
}

bool grids_match(const AngularGrid& a, const AngularGrid& b) {
  if (&a == &b) return true;
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.nodes[i] != b.nodes[i] || a.weights[i] != b.weights[i]) return false;
  }
  return true;
}

void check_field(const IntensityField& field, const CrossSectionTable& table) {
  require(static_cast<bool>(field.grid), ErrorCode::invalid_argument,
          "intensity field has no grid");
  require(grids_match(*field.grid, *table.grid), ErrorCode::config,
          "intensity field grid does not match the table grid");
  require(field.values.size() == static_cast<Eigen::Index>(field.grid->size()),
          ErrorCode::invalid_argument, "field values size mismatch");
}

void check_targets(const std::vector<double>& z_targets, double z0) {
  require(!z_targets.empty(), ErrorCode::invalid_argument, "z_targets is empty");
  double prev = z0;
  for (double z : z_targets) {
    require(std::isfinite(z) && z >= prev, ErrorCode::invalid_argument,
            "z_targets must be non-decreasing and start at or after the "
            "field's current z");
    prev = z;
  }
}

void check_start_nonnegative(const Eigen::VectorXd& v) {
  const double vmax = std::max(v.maxCoeff(), 0.0);
  require(v.minCoeff() >= -1e-14 * vmax, ErrorCode::invalid_argument,
          "initial intensity must be nonnegative");
}

// Rounding-level negative transients are clamped; anything larger means the
// step went unstable.
void clamp_output(Eigen::VectorXd& v) {
  const double vmax = std::max(v.maxCoeff(), 0.0);
  const double floor_level = -1e-14 * vmax;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) {
      require(v[i] >= floor_level, ErrorCode::instability,
              "negative intensity beyond the rounding transient");
      v[i] = 0.0;
    }
  }
}

long segment_steps(double length, double h) {
  require(h > 0.0 && std::isfinite(h), ErrorCode::invalid_argument,
          "step size must be positive");
  const double n = std::ceil(length / h - 1e-9);
  require(n < 1e9, ErrorCode::range, "step-size underflow: segment needs too "
                                     "many steps");
  return std::max(1L, static_cast<long>(n));
}

double kernel_prefactor(const TransportParams& params) {
  return params.k * params.k * params.alpha * params.alpha *
         std::pow(params.ell, params.d + 1) / 4.0;
}

}  // namespace

double IntensityField::total() const {
  require(static_cast<bool>(grid) &&
              values.size() == static_cast<Eigen::Index>(grid->size()),
          ErrorCode::invalid_argument, "malformed intensity field");
  return weights_of(*grid).dot(values);
}

Vec IntensityField::mean_kappa() const {
  const double tot = total();
  require(tot != 0.0, ErrorCode::domain, "moments of a zero field");
  Vec mean = Vec::Zero();
  for (std::size_t i = 0; i < grid->size(); ++i) {
    mean += grid->weights[i] * values[static_cast<Eigen::Index>(i)] *
            grid->nodes[i];
  }
  return mean / tot;
}

double IntensityField::kappa_variance() const {
  const double tot = total();
  require(tot != 0.0, ErrorCode::domain, "moments of a zero field");
  const Vec mean = mean_kappa();
  double var = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    var += grid->weights[i] * values[static_cast<Eigen::Index>(i)] *
           (grid->nodes[i] - mean).squaredNorm();
  }
  return var / tot;
}

Eigen::VectorXd collision_apply(const CrossSectionTable& table,
                                const Eigen::VectorXd& values) {
  require(values.size() == static_cast<Eigen::Index>(table.size()),
          ErrorCode::invalid_argument,
          "values size does not match the table grid");
  const auto w = weights_of(*table.grid);
  return table.q_matrix * w.cwiseProduct(values) -
         table.sigma.cwiseProduct(values);
}

std::vector<IntensityField> solve_angular(const CrossSectionTable& table,
                                          const IntensityField& i0,
                                          const std::vector<double>& z_targets,
                                          const AngularOptions& options) {
  check_field(i0, table);
  check_targets(z_targets, i0.z);
  check_start_nonnegative(i0.values);
  require(options.step_fraction > 0.0 && options.step_fraction <= 0.1,
          ErrorCode::invalid_argument,
          "options.step_fraction must lie in (0, 0.1]");
  require(options.fixed_step >= 0.0 && std::isfinite(options.fixed_step),
          ErrorCode::invalid_argument, "options.fixed_step must be >= 0");

  const auto n = static_cast<Eigen::Index>(table.size());
  const auto w = weights_of(*table.grid);
  std::vector<IntensityField> out;
  out.reserve(z_targets.size());

  if (options.method == AngularMethod::matrix_exp) {
    // Similarity transform by sqrt(w) makes the generator symmetric:
    //   L = Q W - diag(sigma),  M = W^{1/2} Q W^{1/2} - diag(sigma),
    // so the exponential comes from one eigendecomposition.
    const Eigen::VectorXd sqw = w.cwiseSqrt();
    Eigen::MatrixXd m = sqw.asDiagonal() * table.q_matrix * sqw.asDiagonal();
    m.diagonal() -= table.sigma;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    require(es.info() == Eigen::Success, ErrorCode::instability,
            "eigendecomposition of the collision generator failed");
    const Eigen::VectorXd coeffs =
        es.eigenvectors().transpose() * sqw.cwiseProduct(i0.values);
    for (double zt : z_targets) {
      const Eigen::VectorXd scaled =
          (es.eigenvalues().array() * (zt - i0.z)).exp() * coeffs.array();
      IntensityField field;
      field.grid = i0.grid;
      field.values = (es.eigenvectors() * scaled).cwiseQuotient(sqw);
      field.z = zt;
      clamp_output(field.values);
      out.push_back(std::move(field));
    }
    return out;
  }

  // rk4 stability bound: never step past 0.1 / max Sigma even when the
  // caller asks for an explicit step.
  const double h_cap = 0.1 / table.max_sigma();
  const double h_base = options.fixed_step > 0.0
                            ? std::min(options.fixed_step, h_cap)
                            : options.step_fraction / table.max_sigma();
  Eigen::VectorXd v = i0.values;
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n);
  const auto rhs = [&](const Eigen::VectorXd& y) {
    return (table.q_matrix * w.cwiseProduct(y) - table.sigma.cwiseProduct(y))
        .eval();
  };
  double z = i0.z;
  for (double zt : z_targets) {
    const double length = zt - z;
    if (length > 0.0) {
      const long n_steps = segment_steps(length, h_base);
      const double h = length / static_cast<double>(n_steps);
      for (long s = 0; s < n_steps; ++s) {
        k1 = rhs(v);
        k2 = rhs(v + 0.5 * h * k1);
        k3 = rhs(v + 0.5 * h * k2);
        k4 = rhs(v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      z = zt;
    }
    IntensityField field;
    field.grid = i0.grid;
    field.values = v;
    field.z = zt;
    clamp_output(field.values);
    out.push_back(std::move(field));
  }
  return out;
}

std::vector<CharacteristicPoint> point_source_wigner(const IntensityField& i0,
                                                     double z) {
  require(static_cast<bool>(i0.grid) &&
              i0.values.size() == static_cast<Eigen::Index>(i0.grid->size()),
          ErrorCode::invalid_argument, "malformed intensity field");
  require(std::isfinite(z), ErrorCode::invalid_argument, "z must be finite");
  std::vector<CharacteristicPoint> points;
  points.reserve(i0.grid->size());
  for (std::size_t i = 0; i < i0.grid->size(); ++i) {
    CharacteristicPoint p;
    p.kappa = i0.grid->nodes[i];
    p.x = p.kappa / i0.grid->beta_at(i) * z;
    p.weight = i0.grid->weights[i] * i0.values[static_cast<Eigen::Index>(i)];
    points.push_back(p);
  }
  return points;
}

double paraxial_xsection(const TransportParams& params,
                         const MediumSpectrum& spectrum, const Vec& kappa,
                         const Vec& kappa_prime) {
  require(spectrum.d_total() == params.d + 1, ErrorCode::config,
          "medium d_total must equal params.d + 1");
  const Vec dq_t = params.k_ell() * (kappa - kappa_prime);
  return kernel_prefactor(params) * spectrum.psd(dq_t, 0.0);
}

CrossSectionTable build_paraxial_table(const TransportParams& params,
                                       const MediumSpectrum& spectrum,
                                       std::shared_ptr<const AngularGrid> grid) {
  require(static_cast<bool>(grid), ErrorCode::invalid_argument, "grid is null");
  params.validate();
  require(spectrum.d_total() == params.d + 1, ErrorCode::config,
          "medium d_total must equal params.d + 1");

  CrossSectionTable table;
  table.params = params;
  table.grid = grid;
  table.spectrum = std::make_shared<const MediumSpectrum>(spectrum);

  const auto n = static_cast<Eigen::Index>(grid->size());
  const double kl = params.k_ell();
  const double pref = kernel_prefactor(params);

  table.q_matrix.resize(n, n);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const Vec dq_t = kl * (grid->nodes[i] - grid->nodes[j]);
      const double val = pref * table.spectrum->psd(dq_t, 0.0);
      table.q_matrix(i, j) = val;
      table.q_matrix(j, i) = val;
    }
  }

  const double qmax = table.q_matrix.maxCoeff();
  require(std::isfinite(qmax) && qmax > 0.0, ErrorCode::domain,
          "paraxial kernel is zero or not finite on this grid");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double& q = table.q_matrix(i, j);
      require(std::isfinite(q), ErrorCode::instability,
              "non-finite kernel entry");
      if (q < 0.0) {
        require(q > -1e-10 * qmax, ErrorCode::domain,
                "kernel entry significantly negative");
        q = 0.0;
      }
    }
  }

  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) w[j] = grid->weights[j];
  table.sigma = table.q_matrix * w;
  for (Eigen::Index i = 0; i < n; ++i) {
    require(table.sigma[i] > 0.0, ErrorCode::domain,
            "paraxial cross section vanishes at a grid node");
  }
  table.mfp = 2.0 / table.sigma.array();
  table.q_exponent.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // The difference kernel has no dispersion correction in this limit.
    table.q_exponent[i] = {-0.5 * table.sigma[i], 0.0};
  }
  return table;
}

ParaxialResult solve_paraxial(const CrossSectionTable& paraxial_table,
                              const IntensityField& i0,
                              const std::vector<double>& z_targets,
                              const AngularOptions& options) {
  ParaxialResult result;
  result.fields = solve_angular(paraxial_table, i0, z_targets, options);

  // Directions at the outermost resolved |kappa| make up the watch set; mass
  // reaching them means the window no longer contains the beam.
  const AngularGrid& grid = *paraxial_table.grid;
  double edge = 0.0;
  for (const Vec& node : grid.nodes) edge = std::max(edge, node.norm());
  std::vector<std::size_t> boundary;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (edge - grid.nodes[i].norm() <= 1e-9 * edge) boundary.push_back(i);
  }

  for (const IntensityField& field : result.fields) {
    const double tot = field.total();
    if (tot <= 0.0) continue;
    double mass = 0.0;
    for (std::size_t i : boundary) {
      mass += grid.weights[i] * field.values[static_cast<Eigen::Index>(i)];
    }
    result.max_boundary_fraction =
        std::max(result.max_boundary_fraction, mass / tot);
  }
  result.leakage_warning =
      result.max_boundary_fraction > result.leakage_threshold;
  return result;
}

}  // namespace owrte
