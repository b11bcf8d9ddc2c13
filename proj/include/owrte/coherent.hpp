#ifndef OWRTE_COHERENT_HPP
#define OWRTE_COHERENT_HPP

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "owrte/xsection.hpp"

namespace owrte {

enum class SourceKind { gaussian_beam, tabulated };

// Incident beam described by its angular amplitude profile.  The amplitudes
// carry the 1/sqrt(beta) flux normalization, and the overall scale is fixed
// so the total input flux sum_i w_i |a_i|^2 equals `flux`.
struct SourceModel {
  SourceKind kind = SourceKind::gaussian_beam;
  double kappa_width = 0.05;  // sigma of the Gaussian angular profile
  double flux = 1.0;
  // Tabulated |kappa| -> profile amplitude (interpolated linearly).
  std::vector<double> profile_kappa;
  std::vector<double> profile_value;
};

// a_o(kappa_i) on the grid: i C f(kappa) / (2 k sqrt(beta)), with C chosen so
// that sum_i w_i |a_i|^2 == flux.  Requires the angular support to sit
// strictly inside the cone (4 kappa_width < kappa_max for the Gaussian).
Eigen::VectorXcd source_amplitudes(const SourceModel& source,
                                   const TransportParams& params,
                                   const AngularGrid& grid);

// Backward-going amplitude from the same jump conditions: b_o = a_o for a
// planar source radiating symmetrically.  Kept for completeness; nothing
// downstream consumes the backward sector.
Eigen::VectorXcd backward_amplitudes(const SourceModel& source,
                                     const TransportParams& params,
                                     const AngularGrid& grid);

// Mean (coherent) amplitude after range z: A_i(z) = e^{Q_i z} a_i.
Eigen::VectorXcd mean_amplitude(const Eigen::VectorXcd& a0,
                                const CrossSectionTable& table, double z);

// Free-space (alpha = 0) field synthesis from the angular amplitudes:
//   u(x, z) = sum_i w_i (a_i / sqrt(beta_i)) e^{i k (kappa_i . x + beta_i z)}.
std::complex<double> homogeneous_field(const Eigen::VectorXcd& a0,
                                       const TransportParams& params,
                                       const AngularGrid& grid, const Vec& x,
                                       double z);

}  // namespace owrte

#endif
