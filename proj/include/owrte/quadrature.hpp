#ifndef OWRTE_QUADRATURE_HPP
#define OWRTE_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace owrte {

// Gauss-Legendre rule of order n on [-1, 1].  Nodes are computed by Newton
// iteration on P_n and mirrored about the origin, so node/weight pairs are
// bitwise symmetric under negation.
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};
GaussLegendre gauss_legendre(int n);

// Adaptive Gauss-Kronrod integral of f over [a, b].  Throws
// ErrorCode::tolerance if the error estimate stays above
// rel_tol * |result| + abs_floor.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_floor = 1e-300);

// One-sided oscillatory integral  I = \int_0^{zeta_max} f(z) * sin(omega z) dz
// (or cos for `use_cos`).  The range is cut into panels no wider than half the
// oscillation period and each panel is integrated adaptively, which keeps the
// Kronrod error estimate honest for large omega.
double integrate_oscillatory(const std::function<double(double)>& f,
                             double zeta_max, double omega, bool use_cos,
                             double rel_tol = 1e-9);

// \int_0^{s_max} f(s) * J0(q s) ds with the same panel-at-the-period
// treatment (J0 oscillates with quasi-period 2*pi/q for large arguments).
double integrate_j0(const std::function<double(double)>& f, double s_max,
                    double q, double rel_tol = 1e-9);

}  // namespace owrte

#endif
