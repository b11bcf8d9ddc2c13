#include <algorithm>
#include <cmath>
#include <complex>

#include "owrte/coherent.hpp"
#include "owrte/common.hpp"

namespace owrte {

namespace {

double interp_linear(const std::vector<double>& xs,
                     const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return (1.0 - t) * ys[lo] + t * ys[hi];
}

}  // namespace

Eigen::VectorXcd source_amplitudes(const SourceModel& source,
                                   const TransportParams& params,
                                   const AngularGrid& grid) {
  params.validate();
  require(grid.size() > 0, ErrorCode::invalid_argument, "empty grid");
  require(source.flux > 0.0 && std::isfinite(source.flux),
          ErrorCode::invalid_argument, "source flux must be positive");

  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd profile(n);
  if (source.kind == SourceKind::gaussian_beam) {
    require(source.kappa_width > 0.0 && std::isfinite(source.kappa_width),
            ErrorCode::invalid_argument, "kappa_width must be positive");
    require(4.0 * source.kappa_width < grid.kappa_max, ErrorCode::domain,
            "beam support must sit inside the cone: 4*kappa_width < kappa_max");
    const double s2 = source.kappa_width * source.kappa_width;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double k2 = grid.nodes[static_cast<std::size_t>(i)].squaredNorm();
      // amplitude profile; |a|^2 then has angular std kappa_width
      profile[i] = std::exp(-k2 / (4.0 * s2));
    }
  } else {
    require(source.profile_kappa.size() >= 2 &&
                source.profile_kappa.size() == source.profile_value.size(),
            ErrorCode::invalid_argument,
            "tabulated source needs matching kappa/value tables (>= 2 points)");
    require(std::is_sorted(source.profile_kappa.begin(),
                           source.profile_kappa.end()),
            ErrorCode::invalid_argument,
            "tabulated source kappa values must be sorted");
    for (Eigen::Index i = 0; i < n; ++i) {
      const double kn = grid.nodes[static_cast<std::size_t>(i)].norm();
      profile[i] = interp_linear(source.profile_kappa, source.profile_value, kn);
    }
  }

  // a_i = i C f_i / (2 k sqrt(beta_i)); choose C to hit the requested flux
  double raw_flux = 0.0;
  Eigen::VectorXd base(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double b = grid.beta_at(static_cast<std::size_t>(i));
    base[i] = profile[i] / (2.0 * params.k * std::sqrt(b));
    raw_flux += grid.weights[static_cast<std::size_t>(i)] * base[i] * base[i];
  }
  require(raw_flux > 0.0, ErrorCode::domain,
          "source profile has no mass on the grid");
  const double scale = std::sqrt(source.flux / raw_flux);

  Eigen::VectorXcd a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a[i] = std::complex<double>(0.0, scale * base[i]);
  }
  return a;
}

Eigen::VectorXcd backward_amplitudes(const SourceModel& source,
                                     const TransportParams& params,
                                     const AngularGrid& grid) {
  // The jump conditions at a planar source give b_o = a_o.
  return source_amplitudes(source, params, grid);
}

Eigen::VectorXcd mean_amplitude(const Eigen::VectorXcd& a0,
                                const CrossSectionTable& table, double z) {
  const auto n = static_cast<Eigen::Index>(table.size());
  require(a0.size() == n, ErrorCode::invalid_argument,
          "amplitude vector does not match the table");
  require(std::isfinite(z) && z >= 0.0, ErrorCode::invalid_argument,
          "z must be finite and nonnegative");
  require(table.q_exponent.size() == n, ErrorCode::invalid_argument,
          "table has no Q exponent data");
  Eigen::VectorXcd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = std::exp(table.q_exponent[i] * z) * a0[i];
  }
  return out;
}

std::complex<double> homogeneous_field(const Eigen::VectorXcd& a0,
                                       const TransportParams& params,
                                       const AngularGrid& grid, const Vec& x,
                                       double z) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(grid.size());
  require(a0.size() == n, ErrorCode::invalid_argument,
          "amplitude vector does not match the grid");
  require(std::isfinite(z) && z > 0.0, ErrorCode::domain,
          "homogeneous_field is defined for z > 0 only");
  std::complex<double> u(0.0, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double b = grid.beta_at(idx);
    const double phase = params.k * (grid.nodes[idx].dot(x) + b * z);
    u += grid.weights[idx] * (a0[i] / std::sqrt(b)) *
         std::exp(std::complex<double>(0.0, phase));
  }
  return u;
}

}  // namespace owrte
