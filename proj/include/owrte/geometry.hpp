#ifndef OWRTE_GEOMETRY_HPP
#define OWRTE_GEOMETRY_HPP

#include <cstddef>
#include <vector>

#include "owrte/common.hpp"

namespace owrte {

// Physical inputs of a run.  kappa/x live in units of the carrier wavelength
// scale through k; ell is the medium correlation length; alpha the relative
// fluctuation strength.  d is the transverse dimension (1 or 2).
struct TransportParams {
  double k = two_pi;       // carrier wavenumber [1/length]
  double ell = 1.0;        // correlation length [length]
  double alpha = 0.05;     // fluctuation amplitude (dimensionless)
  int d = 1;               // transverse dimension
  double kappa_max = 0.0;  // propagation-cone truncation; 0 = use default

  double k_ell() const { return k * ell; }
  // Ratio wavelength / correlation length; the small parameter of the
  // forward-peaked regime.
  double gamma() const { return two_pi / (k * ell); }

  // Fills kappa_max with the default cutoff if unset and validates everything.
  void finalize();
  void validate() const;
};

// Default cone truncation: stay a safe margin inside the band where
// k*ell*beta(kappa) > 1, so the longitudinal wavenumber transfer stays
// resolvable by the medium spectrum.
double default_kappa_max(double k_ell);

// beta(kappa) = sqrt(1 - |kappa|^2), the longitudinal direction cosine.
// Throws ErrorCode::domain for |kappa| >= 1 (evanescent).
double beta(const Vec& kappa);

// grad beta = -kappa / beta.
Vec grad_beta(const Vec& kappa);

// Quadrature grid over the truncated cone {|kappa| <= kappa_max}.  Weights
// absorb the measure k^d dkappa / (2 pi)^d, so plain weighted sums implement
// the transport-equation integrals.  The node set is symmetric under
// kappa -> -kappa with bitwise-equal weights.
struct AngularGrid {
  int d = 1;
  double kappa_max = 0.0;
  double k = 0.0;                 // wavenumber the measure was scaled with
  std::vector<Vec> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double total_weight() const;
  // Index of the node closest to kappa.
  std::size_t nearest(const Vec& kappa) const;
  double beta_at(std::size_t i) const { return beta(nodes[i]); }
};

// d = 1: Gauss-Legendre nodes on [-kappa_max, kappa_max].
AngularGrid make_grid_1d(const TransportParams& params, int n);

// d = 2: Gauss-Legendre in radius x uniform in angle (polar Jacobian folded
// into the weights).  n_angular is rounded up to an even count so the node
// set closes under negation.
AngularGrid make_grid_2d(const TransportParams& params, int n_radial,
                         int n_angular);

// Uniform midpoint grid on [-kappa_window, kappa_window] (d = 1).  Used by the
// paraxial solver, where a translation-invariant node layout makes the
// difference kernel exactly Toeplitz.
AngularGrid make_uniform_grid_1d(const TransportParams& params,
                                 double kappa_window, int n);

}  // namespace owrte

#endif
