#ifndef OWRTE_MEDIUM_HPP
#define OWRTE_MEDIUM_HPP

#include <memory>
#include <vector>

#include "owrte/common.hpp"

namespace owrte {

enum class SpectrumKind { gaussian_isotropic, lorentzian_2d, tabulated_isotropic };

// Second-order statistics of the medium fluctuations, in units of the
// correlation length (offsets r and wavevectors q are dimensionless).
// All bundled models are isotropic in the full d_total = d + 1 space; the
// interface still separates transverse and longitudinal arguments because the
// scattering integrals treat them differently.
class MediumSpectrum {
 public:
  // R(r) = variance_scale * exp(-|r|^2 / 2).
  static MediumSpectrum gaussian(double variance_scale = 1.0, int d_total = 2);

  // Spectrum-side model of Eq.-(21) type in two total dimensions:
  // breve R(q) = r0 / (1 + q^2) for q <= q_cutoff, 0 beyond.  The ultraviolet
  // cutoff keeps the autocovariance finite at the origin.
  static MediumSpectrum lorentzian2d(double r0 = 1.0, double q_cutoff = 1.0e3);

  // Isotropic autocovariance sampled on radii s[i] (increasing, s[0] == 0).
  // Queries between samples use monotone cubic interpolation; queries beyond
  // s.back() raise ErrorCode::range from autocovariance(), while the internal
  // transforms treat the profile as zero there.
  static MediumSpectrum tabulated(std::vector<double> s, std::vector<double> r,
                                  int d_total);

  SpectrumKind kind() const { return kind_; }
  int d_total() const { return d_total_; }
  double variance_scale() const { return variance_scale_; }
  double r0() const { return r0_; }
  double q_cutoff() const { return q_cutoff_; }

  // R(r_t, r_z): autocovariance at transverse offset r_t, longitudinal r_z.
  double autocovariance(const Vec& r_t, double r_z) const;
  double autocov_iso(double s) const;

  // Full d_total-dimensional power spectral density \tilde R(q_t, q_z).
  double psd(const Vec& q_t, double q_z) const;
  double psd_iso(double q) const;

  // Partial transform over the transverse coordinates only:
  // \hat R(q_t, zeta) = \int R(r_t, zeta) e^{-i q_t . r_t} dr_t  (real, even).
  double partial_psd(const Vec& q_t, double zeta) const;
  double partial_psd_iso(double q_t, double zeta) const;

  // Hankel-side isotropic spectrum for d_total = 2:
  // breve R(q) = \int_0^inf s R_iso(s) J0(q s) ds.
  double breve_iso(double q) const;

  // \int_0^inf R_iso(s) ds, used by the high-frequency mean free path.
  double line_integral_iso() const;

  // Longitudinal range beyond which |partial_psd(q_t, zeta)| stays below
  // tol * |partial_psd(q_t, 0)|.
  double zeta_range(double q_t, double tol = 1e-12) const;

  // Radius beyond which the autocovariance is treated as negligible: the
  // table end for tabulated models, a decay radius for the analytic ones.
  // Real-space quadratures truncate here.
  double support_radius() const;

 private:
  MediumSpectrum() = default;

  SpectrumKind kind_ = SpectrumKind::gaussian_isotropic;
  int d_total_ = 2;
  double variance_scale_ = 1.0;  // gaussian
  double r0_ = 1.0;              // lorentzian
  double q_cutoff_ = 1.0e3;      // lorentzian

  struct Table;                  // tabulated model data
  std::shared_ptr<const Table> table_;
};

}  // namespace owrte

#endif
