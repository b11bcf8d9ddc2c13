#include "owrte/xsection.hpp"

#include <cmath>
#include <complex>

#include "omp_guard.hpp"
#include "owrte/common.hpp"
#include "owrte/quadrature.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace owrte {

namespace {

// The transverse dimension of the transport problem fixes the total dimension
// of the medium statistics (d transverse + 1 longitudinal).
void check_medium(const TransportParams& params, const MediumSpectrum& spectrum) {
  require(spectrum.d_total() == params.d + 1, ErrorCode::config,
          "medium d_total must equal params.d + 1 (transverse + range)");
}

double kernel_prefactor(const TransportParams& params) {
  return params.k * params.k * params.alpha * params.alpha *
         std::pow(params.ell, params.d + 1) / 4.0;
}

}  // namespace

double diff_xsection(const TransportParams& params, const MediumSpectrum& spectrum,
                     const Vec& kappa, const Vec& kappa_prime) {
  check_medium(params, spectrum);
  const double b = beta(kappa);
  const double bp = beta(kappa_prime);
  const double kl = params.k_ell();
  const Vec dq_t = kl * (kappa - kappa_prime);
  const double dq_z = kl * (b - bp);
  return kernel_prefactor(params) / (b * bp) * spectrum.psd(dq_t, dq_z);
}

double total_xsection(const TransportParams& params, const MediumSpectrum& spectrum,
                      const Vec& kappa, const AngularGrid& grid) {
  check_medium(params, spectrum);
  double sigma = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    sigma += grid.weights[j] * diff_xsection(params, spectrum, kappa, grid.nodes[j]);
  }
  require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::domain,
          "total cross section must be positive; the medium spectrum vanishes "
          "over the resolved cone");
  return sigma;
}

double mean_free_path(const TransportParams& params, const MediumSpectrum& spectrum,
                      const Vec& kappa, const AngularGrid& grid) {
  return 2.0 / total_xsection(params, spectrum, kappa, grid);
}

double mfp_highfreq(const TransportParams& params, const MediumSpectrum& spectrum,
                    const Vec& kappa) {
  check_medium(params, spectrum);
  const double b = beta(kappa);
  // Isotropic statistics: \int R(kappa zeta / beta, zeta) dzeta collapses to
  // 2 beta \int_0^inf R_iso(s) ds because the radial argument is |zeta| / beta.
  const double i0 = spectrum.line_integral_iso();
  require(i0 > 0.0, ErrorCode::domain,
          "line integral of the autocovariance must be positive");
  return 4.0 * b /
         (params.k * params.k * params.alpha * params.alpha * params.ell * i0);
}

namespace {

// Imaginary part of the exponent at node kappa: the one-sided longitudinal
// quadrature sum_j w_j (pref / beta beta_j) \int_0^inf \hat R(q_t, zeta)
// sin(q_z zeta) dzeta with q = k ell (kappa - kappa_j, beta - beta_j).
double imag_exponent(const TransportParams& params, const MediumSpectrum& spectrum,
                     const Vec& kappa, const AngularGrid& grid, double rel_tol) {
  const double kl = params.k_ell();
  const double pref = kernel_prefactor(params);
  const double b = beta(kappa);
  const double peak = spectrum.partial_psd_iso(0.0, 0.0);
  double im = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double bj = grid.beta_at(j);
    const double omega = kl * (b - bj);
    if (omega == 0.0) continue;  // sin factor vanishes identically
    const double qt = kl * (kappa - grid.nodes[j]).norm();
    if (spectrum.partial_psd_iso(qt, 0.0) < 1e-18 * peak) continue;
    const double zmax = spectrum.zeta_range(qt);
    const double h = integrate_oscillatory(
        [&](double zeta) { return spectrum.partial_psd_iso(qt, zeta); }, zmax,
        omega, /*use_cos=*/false, rel_tol);
    im += grid.weights[j] * pref / (b * bj) * h;
  }
  return im;
}

}  // namespace

std::complex<double> q_exponent(const TransportParams& params,
                                const MediumSpectrum& spectrum, const Vec& kappa,
                                const AngularGrid& grid) {
  const double sigma = total_xsection(params, spectrum, kappa, grid);
  const double im = imag_exponent(params, spectrum, kappa, grid, 1e-9);
  return {-0.5 * sigma, im};
}

CrossSectionTable build_xsection_table(const TransportParams& params,
                                       const MediumSpectrum& spectrum,
                                       std::shared_ptr<const AngularGrid> grid,
                                       const TableOptions& options) {
  require(static_cast<bool>(grid), ErrorCode::invalid_argument, "grid is null");
  params.validate();
  check_medium(params, spectrum);
  require(options.quad_rel_tol > 0 && options.quad_rel_tol < 1e-2,
          ErrorCode::invalid_argument,
          "options.quad_rel_tol out of range (0, 1e-2)");
  // Dense n x n storage; cap the node count so tables stay well under memory
  // limits (n <= 512 for d=1, <= 4096 nodes for d=2).
  const std::size_t node_cap = params.d == 1 ? 512 : 4096;
  require(grid->size() <= node_cap, ErrorCode::config,
          "grid too large for a dense cross-section table");

  CrossSectionTable table;
  table.params = params;
  table.grid = grid;
  table.spectrum = std::make_shared<const MediumSpectrum>(spectrum);

  const auto n = static_cast<Eigen::Index>(grid->size());
  const double kl = params.k_ell();
  const double pref = kernel_prefactor(params);

  Eigen::VectorXd betas(n);
  for (Eigen::Index i = 0; i < n; ++i) betas[i] = grid->beta_at(i);

  table.q_matrix.resize(n, n);
  {
    OmpGuard guard;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index i = 0; i < n; ++i) {
      guard.run([&, i] {
        for (Eigen::Index j = i; j < n; ++j) {
          const Vec dq_t = kl * (grid->nodes[i] - grid->nodes[j]);
          const double dq_z = kl * (betas[i] - betas[j]);
          const double val =
              pref / (betas[i] * betas[j]) * table.spectrum->psd(dq_t, dq_z);
          table.q_matrix(i, j) = val;
          table.q_matrix(j, i) = val;
        }
      });
    }
    guard.rethrow();
  }

  // Direction-resolved spectra can come out of their quadratures with tiny
  // negative lobes; clamp those and refuse anything that is not rounding.
  const double qmax = table.q_matrix.maxCoeff();
  require(std::isfinite(qmax) && qmax > 0.0, ErrorCode::domain,
          "scattering kernel is zero or not finite on this grid");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double& q = table.q_matrix(i, j);
      require(std::isfinite(q), ErrorCode::instability,
              "non-finite kernel entry");
      if (q < 0.0) {
        require(q > -1e-10 * qmax, ErrorCode::domain,
                "kernel entry significantly negative: medium PSD violates "
                "nonnegativity on this grid");
        q = 0.0;
      }
    }
  }

  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) w[j] = grid->weights[j];
  table.sigma = table.q_matrix * w;
  for (Eigen::Index i = 0; i < n; ++i) {
    require(table.sigma[i] > 0.0, ErrorCode::domain,
            "total cross section vanishes at a grid node");
  }
  table.mfp = 2.0 / table.sigma.array();

  table.q_exponent.resize(n);
  if (options.compute_imag_q) {
    // H_ij is antisymmetric (the sin argument flips with i <-> j), so only the
    // upper triangle is quadratured.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    const double peak = table.spectrum->partial_psd_iso(0.0, 0.0);
    OmpGuard guard;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index i = 0; i < n; ++i) {
      guard.run([&, i] {
        for (Eigen::Index j = i + 1; j < n; ++j) {
          const double omega = kl * (betas[i] - betas[j]);
          if (omega == 0.0) continue;
          const double qt = kl * (grid->nodes[i] - grid->nodes[j]).norm();
          if (table.spectrum->partial_psd_iso(qt, 0.0) < 1e-18 * peak) continue;
          const double zmax = table.spectrum->zeta_range(qt);
          h(i, j) = integrate_oscillatory(
              [&](double zeta) {
                return table.spectrum->partial_psd_iso(qt, zeta);
              },
              zmax, omega, /*use_cos=*/false, options.quad_rel_tol);
          h(j, i) = -h(i, j);
        }
      });
    }
    guard.rethrow();
    for (Eigen::Index i = 0; i < n; ++i) {
      double im = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        im += w[j] * pref / (betas[i] * betas[j]) * h(i, j);
      }
      table.q_exponent[i] = {-0.5 * table.sigma[i], im};
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      table.q_exponent[i] = {-0.5 * table.sigma[i], 0.0};
    }
  }
  return table;
}

HGParams hg_params(double k_ell, double r0, const TransportParams& params) {
  require(params.d == 1, ErrorCode::unsupported,
          "Henyey-Greenstein identification applies to the d = 1 cone");
  require(k_ell > 1.0 && r0 > 0.0, ErrorCode::invalid_argument,
          "hg_params requires k_ell > 1 and r0 > 0");
  const double l2 = k_ell * k_ell;
  HGParams hg;
  hg.g = 1.0 + 0.5 / l2 - std::sqrt(1.0 + 0.25 / l2) / k_ell;
  hg.mu_s = (1.0 - hg.g) / (1.0 + hg.g) * pi * std::pow(params.k, 3) *
            params.ell * params.ell * params.alpha * params.alpha * r0 / 2.0;
  return hg;
}

double hg_phase(double g, double theta) {
  require(g > -1.0 && g < 1.0, ErrorCode::invalid_argument,
          "anisotropy g must lie in (-1, 1)");
  return (1.0 - g * g) /
         (two_pi * (1.0 + g * g - 2.0 * g * std::cos(theta)));
}

double verify_hg_identification(const TransportParams& params,
                                const MediumSpectrum& spectrum, double r0,
                                int n_theta) {
  require(params.d == 1, ErrorCode::unsupported,
          "HG identification is for d = 1");
  require(spectrum.kind() == SpectrumKind::lorentzian_2d, ErrorCode::config,
          "HG identification holds for the Lorentzian2D medium");
  require(n_theta >= 2, ErrorCode::invalid_argument, "n_theta must be >= 2");
  // Within the cutoff the Hankel spectrum is exactly r0 / (1 + q^2); the
  // largest argument probed below is 2 k ell.
  require(spectrum.q_cutoff() > 2.0 * params.k_ell(), ErrorCode::config,
          "spectral cutoff must exceed 2 k ell for the closed form to apply");

  const HGParams hg = hg_params(params.k_ell(), r0, params);
  double max_dev = 0.0;
  for (int t = 0; t < n_theta; ++t) {
    const double delta = (t + 0.5) * pi / n_theta;
    // Symmetric pair theta = +/- delta/2 keeps both directions in the cone.
    const Vec kappa(std::sin(0.5 * delta), 0.0);
    const Vec kappa_prime(-std::sin(0.5 * delta), 0.0);
    const double b = std::cos(0.5 * delta);
    // Kernel per unit arc length on the direction circle: the beta(theta)
    // converts range to path length, k beta' dtheta' / (2 pi) is the measure.
    const double arc_kernel =
        diff_xsection(params, spectrum, kappa, kappa_prime) * params.k * b * b /
        two_pi;
    const double target = hg.mu_s * hg_phase(hg.g, delta);
    const double dev = std::abs(arc_kernel - target) / target;
    max_dev = std::max(max_dev, dev);
  }
  return max_dev;
}

double verify_rte3d_reduction(const TransportParams& params,
                              const MediumSpectrum& spectrum, const Vec& kappa,
                              const Vec& kappa_prime, double c0) {
  require(params.d == 2, ErrorCode::unsupported,
          "the standard radiative transfer reduction is three-dimensional");
  check_medium(params, spectrum);
  require(c0 > 0.0 && std::isfinite(c0), ErrorCode::invalid_argument,
          "wave speed c0 must be positive");

  // Independent route: the cross section of the standard transport equation,
  // sigma(K, K') = pi c0^2 k^2 ell^3 alpha^2 / (2 (2 pi)^3)
  //                * \tilde R_3(ell (K - K')) * delta(omega(K) - omega(K')),
  // with omega(K) = c0 |K|, reduced onto the forward shell K = k(kappa, beta).
  const double omega = c0 * params.k;      // frequency carried on the shell
  const double k = omega / c0;             // back to the wavenumber
  const double b = beta(kappa);
  const double bp = beta(kappa_prime);

  Eigen::Vector3d big_k(k * kappa.x(), k * kappa.y(), k * b);
  Eigen::Vector3d big_kp(k * kappa_prime.x(), k * kappa_prime.y(), k * bp);
  const double q3 = params.ell * (big_k - big_kp).norm();

  const double sigma_amp = pi * c0 * c0 * k * k * std::pow(params.ell, 3) *
                           params.alpha * params.alpha /
                           (2.0 * std::pow(two_pi, 3)) * spectrum.psd_iso(q3);
  // The frequency delta collapses the K_z' integral with Jacobian 1/(c0 beta),
  // the forward-cone ansatz for W carries 1/beta', and the grid measure
  // d(k kappa') / (2 pi)^2 restores the (2 pi)^2.
  const double reduced = sigma_amp * two_pi * two_pi / (c0 * c0 * b * bp);

  const double direct = diff_xsection(params, spectrum, kappa, kappa_prime);
  require(direct > 0.0, ErrorCode::domain,
          "direct kernel vanishes at the requested pair");
  return std::abs(reduced - direct) / direct;
}

}  // namespace owrte
