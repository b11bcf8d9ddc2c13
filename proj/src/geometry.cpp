#include "owrte/geometry.hpp"

#include <cmath>
#include <limits>

#include "owrte/quadrature.hpp"

namespace owrte {

double default_kappa_max(double k_ell) {
  require(k_ell > 1.0, ErrorCode::domain,
          "default_kappa_max: requires k * ell > 1 (forward-peaked regime)");
  // Largest cone for which k ell beta(kappa) > 1, pulled in by a 5% margin.
  return 0.95 * std::sqrt(1.0 - 1.0 / (k_ell * k_ell));
}

void TransportParams::validate() const {
  require(k > 0.0 && std::isfinite(k), ErrorCode::invalid_argument,
          "params.k: wavenumber must be positive");
  require(ell > 0.0 && std::isfinite(ell), ErrorCode::invalid_argument,
          "params.ell: correlation length must be positive");
  require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::invalid_argument,
          "params.alpha: fluctuation amplitude must be positive");
  require(d == 1 || d == 2, ErrorCode::invalid_argument,
          "params.d: transverse dimension must be 1 or 2");
  require(k_ell() > 1.0, ErrorCode::domain,
          "params: k * ell must exceed 1 (forward-peaked regime)");
  require(kappa_max > 0.0 && kappa_max < 1.0, ErrorCode::domain,
          "params.kappa_max: cone truncation must lie in (0, 1)");
  Vec edge(kappa_max, 0.0);
  require(k_ell() * beta(edge) > 1.0, ErrorCode::domain,
          "params.kappa_max: k ell beta(kappa_max) must exceed 1 so the "
          "longitudinal transfer stays within the spectrum's reach");
}

void TransportParams::finalize() {
  if (kappa_max == 0.0) kappa_max = default_kappa_max(k * ell);
  validate();
}

double beta(const Vec& kappa) {
  double n2 = kappa.squaredNorm();
  require(n2 < 1.0, ErrorCode::domain,
          "beta: |kappa| must be < 1 (propagating directions only)");
  return std::sqrt(1.0 - n2);
}

Vec grad_beta(const Vec& kappa) { return -kappa / beta(kappa); }

double AngularGrid::total_weight() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

std::size_t AngularGrid::nearest(const Vec& kappa) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double dd = (nodes[i] - kappa).squaredNorm();
    if (dd < best_d) {
      best_d = dd;
      best = i;
    }
  }
  return best;
}

AngularGrid make_grid_1d(const TransportParams& params, int n) {
  TransportParams p = params;
  p.finalize();
  require(p.d == 1, ErrorCode::invalid_argument, "make_grid_1d: params.d must be 1");
  require(n >= 8, ErrorCode::config,
          "make_grid_1d: at least 8 nodes required");

  GaussLegendre rule = gauss_legendre(n);
  AngularGrid grid;
  grid.d = 1;
  grid.kappa_max = p.kappa_max;
  grid.k = p.k;
  grid.nodes.resize(n);
  grid.weights.resize(n);
  const double measure = p.k / two_pi;  // k dkappa / (2 pi)
  for (int i = 0; i < n; ++i) {
    grid.nodes[i] = Vec(p.kappa_max * rule.x[i], 0.0);
    grid.weights[i] = measure * p.kappa_max * rule.w[i];
  }
  return grid;
}

AngularGrid make_grid_2d(const TransportParams& params, int n_radial,
                         int n_angular) {
  TransportParams p = params;
  p.finalize();
  require(p.d == 2, ErrorCode::invalid_argument, "make_grid_2d: params.d must be 2");
  require(n_radial >= 8 && n_angular >= 8, ErrorCode::config,
          "make_grid_2d: at least 8 nodes per dimension required");
  if (n_angular % 2 != 0) ++n_angular;  // close the node set under negation

  // Gauss-Legendre in radius on [0, kappa_max] (polar Jacobian in the
  // weight), uniform trapezoid in angle (exact for periodic integrands).
  GaussLegendre rule = gauss_legendre(n_radial);
  AngularGrid grid;
  grid.d = 2;
  grid.kappa_max = p.kappa_max;
  grid.k = p.k;
  grid.nodes.reserve(static_cast<std::size_t>(n_radial) * n_angular);
  grid.weights.reserve(static_cast<std::size_t>(n_radial) * n_angular);
  const double measure = (p.k / two_pi) * (p.k / two_pi);
  const double dtheta = two_pi / n_angular;
  for (int i = 0; i < n_radial; ++i) {
    double r = 0.5 * p.kappa_max * (rule.x[i] + 1.0);
    double wr = 0.5 * p.kappa_max * rule.w[i];
    double w = measure * wr * r * dtheta;
    // Lay out each ring as the first half followed by its exact negation so
    // the node set is bitwise symmetric under kappa -> -kappa.
    std::size_t ring_start = grid.nodes.size();
    for (int a = 0; a < n_angular / 2; ++a) {
      double theta = dtheta * a;
      grid.nodes.emplace_back(r * std::cos(theta), r * std::sin(theta));
      grid.weights.push_back(w);
    }
    for (int a = 0; a < n_angular / 2; ++a) {
      Vec m = grid.nodes[ring_start + a];
      grid.nodes.emplace_back(-m.x(), -m.y());
      grid.weights.push_back(w);
    }
  }
  return grid;
}

AngularGrid make_uniform_grid_1d(const TransportParams& params,
                                 double kappa_window, int n) {
  TransportParams p = params;
  p.finalize();
  require(p.d == 1, ErrorCode::invalid_argument,
          "make_uniform_grid_1d: params.d must be 1");
  require(kappa_window > 0.0, ErrorCode::invalid_argument,
          "make_uniform_grid_1d: window must be positive");
  require(n >= 8, ErrorCode::config,
          "make_uniform_grid_1d: at least 8 nodes required");

  require(kappa_window < 1.0, ErrorCode::domain,
          "make_uniform_grid_1d: window must stay inside the unit cone");

  AngularGrid grid;
  grid.d = 1;
  grid.kappa_max = kappa_window;
  grid.k = p.k;
  grid.nodes.resize(n);
  grid.weights.resize(n);
  const double h = 2.0 * kappa_window / n;
  const double measure = p.k / two_pi;
  // Midpoint nodes, mirrored so the set is bitwise symmetric under negation;
  // equal weights make node-shift translations exact.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = -kappa_window + (i + 0.5) * h;
    if (2 * i + 1 == n) x = 0.0;
    grid.nodes[i] = Vec(x, 0.0);
    grid.nodes[n - 1 - i] = Vec(-x, 0.0);
  }
  for (int i = 0; i < n; ++i) grid.weights[i] = measure * h;
  return grid;
}

}  // namespace owrte
