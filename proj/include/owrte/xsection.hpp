#ifndef OWRTE_XSECTION_HPP
#define OWRTE_XSECTION_HPP

#include <Eigen/Core>
#include <complex>
#include <memory>

#include "owrte/geometry.hpp"
#include "owrte/medium.hpp"

namespace owrte {

// Differential scattering cross section between cone directions,
//   Q(kappa, kappa') = (k^2 alpha^2 ell^{d+1} / (4 beta beta'))
//                      * \tilde R(k ell (kappa - kappa'), k ell (beta - beta')).
// Units: 1 / (length * [k kappa']^d), so integrating against the grid measure
// k^d dkappa'/(2 pi)^d yields rates per unit range.
double diff_xsection(const TransportParams& params, const MediumSpectrum& spectrum,
                     const Vec& kappa, const Vec& kappa_prime);

// Complex exponent Q(kappa) governing the coherent amplitude,
// A(kappa, z) = e^{Q(kappa) z} a_o(kappa).  The real part is assembled through
// the PSD route (Re Q = -Sigma/2 with Sigma quadratured on `grid`); the
// imaginary part integrates the partial transform against sin(k ell
// (beta - beta') zeta) over the one-sided longitudinal range.
std::complex<double> q_exponent(const TransportParams& params,
                                const MediumSpectrum& spectrum, const Vec& kappa,
                                const AngularGrid& grid);

// Total cross section Sigma(kappa) = \int Q(kappa, kappa') k^d dkappa'/(2pi)^d.
double total_xsection(const TransportParams& params, const MediumSpectrum& spectrum,
                      const Vec& kappa, const AngularGrid& grid);

// Scattering mean free path S(kappa) = 2 / Sigma(kappa) = -1 / Re Q(kappa).
double mean_free_path(const TransportParams& params, const MediumSpectrum& spectrum,
                      const Vec& kappa, const AngularGrid& grid);

// High-frequency asymptotic mean free path (k ell >> 1):
//   S(kappa) ~ 8 beta^2 / (k^2 alpha^2 ell \int R(kappa zeta / beta, zeta) dzeta),
// which for isotropic media reduces to 4 beta / (k^2 alpha^2 ell I0) with
// I0 = \int_0^inf R_iso(s) ds.
double mfp_highfreq(const TransportParams& params, const MediumSpectrum& spectrum,
                    const Vec& kappa);

struct TableOptions {
  bool compute_imag_q = true;  // the zeta quadratures dominate build time
  double quad_rel_tol = 1e-9;
};

// Dense kernel table over a grid: everything the solvers and the Monte Carlo
// sampler need, precomputed once.
struct CrossSectionTable {
  TransportParams params;
  std::shared_ptr<const AngularGrid> grid;
  std::shared_ptr<const MediumSpectrum> spectrum;
  Eigen::MatrixXd q_matrix;      // Q(kappa_i, kappa_j), symmetric, >= 0
  Eigen::VectorXd sigma;         // Sigma(kappa_i)
  Eigen::VectorXd mfp;           // S(kappa_i) = 2 / Sigma_i
  Eigen::VectorXcd q_exponent;   // complex exponent at each node

  std::size_t size() const { return grid->size(); }
  double max_sigma() const { return sigma.maxCoeff(); }
  double min_mfp() const { return mfp.minCoeff(); }
  double max_mfp() const { return mfp.maxCoeff(); }
};

CrossSectionTable build_xsection_table(const TransportParams& params,
                                       const MediumSpectrum& spectrum,
                                       std::shared_ptr<const AngularGrid> grid,
                                       const TableOptions& options = {});

// Henyey-Greenstein identification for the two-dimensional Lorentzian medium:
// closed-form anisotropy g and scattering coefficient mu_s such that the
// reduced kernel equals mu_s * p_g(theta - theta').
struct HGParams {
  double g;
  double mu_s;
};
HGParams hg_params(double k_ell, double r0, const TransportParams& params);

// Normalized HG phase function on the circle, \int_0^{2pi} p = 1.
double hg_phase(double g, double theta);

// Max relative deviation between the angular kernel and mu_s * p_g over
// n_theta uniformly spaced angle differences.
double verify_hg_identification(const TransportParams& params,
                                const MediumSpectrum& spectrum, double r0,
                                int n_theta);

// Relative deviation between diff_xsection and the on-shell reduction of the
// standard three-dimensional RTE kernel (d = 2).  Exercises an independently
// coded chain of delta-function Jacobians; deviations should sit at rounding
// level.
double verify_rte3d_reduction(const TransportParams& params,
                              const MediumSpectrum& spectrum, const Vec& kappa,
                              const Vec& kappa_prime, double c0 = 1.0);

}  // namespace owrte

#endif
