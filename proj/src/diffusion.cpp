#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "owrte/common.hpp"
#include "owrte/quadrature.hpp"
#include "owrte/transport.hpp"

namespace owrte {

namespace {

using TransFn = std::function<double(const Vec&)>;

// Fourth-order stencils; the media are normalized to O(1) correlation scale.
// The step is chosen against the *evaluation noise* of the non-analytic
// media (pchip interpolation error, Hankel quadrature tolerance), which the
// third-derivative stencil amplifies by ~1/h^3 -- well above pure rounding.
constexpr double kFdStep = 0.06;

double dir2(const TransFn& f, const Vec& r0, const Vec& e, double h) {
  return (-f(r0 - 2 * h * e) + 16.0 * f(r0 - h * e) - 30.0 * f(r0) +
          16.0 * f(r0 + h * e) - f(r0 + 2 * h * e)) /
         (12.0 * h * h);
}

double dir1(const std::function<double(double)>& g, double h) {
  // g(a) = value at signed offset a*h along the probe direction
  return (g(-2.0) - 8.0 * g(-1.0) + 8.0 * g(1.0) - g(2.0)) / (12.0 * h);
}

double dir3(const std::function<double(double)>& g, double h) {
  return (g(-3.0) - 8.0 * g(-2.0) + 13.0 * g(-1.0) - 13.0 * g(1.0) +
          8.0 * g(2.0) - g(3.0)) /
         (8.0 * h * h * h);
}

double mixed2(const TransFn& f, const Vec& r0, double h) {
  // nested 4th-order first derivatives along x then y
  const double c[4] = {1.0, -8.0, 8.0, -1.0};
  const double off[4] = {-2.0, -1.0, 1.0, 2.0};
  double outer = 0.0;
  for (int a = 0; a < 4; ++a) {
    double inner = 0.0;
    for (int b = 0; b < 4; ++b) {
      inner += c[b] * f(r0 + Vec(off[a] * h, off[b] * h));
    }
    outer += c[a] * inner / (12.0 * h);
  }
  return outer / (12.0 * h);
}

void check_medium(const TransportParams& params, const MediumSpectrum& spectrum) {
  require(spectrum.d_total() == params.d + 1, ErrorCode::config,
          "medium d_total must equal params.d + 1");
}

// A hard spectral cutoff at q_cutoff leaves bandlimited ripples of frequency
// q_cutoff in the autocovariance; their third derivative scales like
// q_cutoff^3, and any fixed-step stencil aliases them into noise of the same
// order as the answer.  Only resolvable cutoffs are accepted -- beyond that
// the diffusion coefficients are genuinely cutoff-dominated anyway.
void check_resolvable(const MediumSpectrum& spectrum, double h) {
  if (spectrum.kind() != SpectrumKind::lorentzian_2d) return;
  require(spectrum.q_cutoff() * h <= 1.0, ErrorCode::domain,
          "Lorentzian spectral cutoff too high for the difference stencils; "
          "the diffusion coefficients would be cutoff-scale ripple noise");
}

DiffusionCoeffs gaussian_coeffs(const TransportParams& params,
                                const MediumSpectrum& spectrum,
                                const Vec& kappa) {
  const double b = beta(kappa);
  const double v = spectrum.variance_scale();
  const double c =
      params.alpha * params.alpha * v * std::sqrt(two_pi) / (8.0 * b);
  DiffusionCoeffs out;
  out.kappa = kappa;
  for (int j = 0; j < params.d; ++j) {
    for (int l = 0; l < params.d; ++l) {
      out.a(j, l) = c * ((j == l ? 1.0 : 0.0) - kappa[j] * kappa[l]);
    }
    out.b[j] = -params.d * c * kappa[j];
  }
  return out;
}

DiffusionCoeffs fd_coeffs(const TransportParams& params,
                          const MediumSpectrum& spectrum, const Vec& kappa) {
  check_resolvable(spectrum, kFdStep);
  const int d = params.d;
  const double b = beta(kappa);
  const double alpha2 = params.alpha * params.alpha;
  const double h = kFdStep;
  const double srad = spectrum.support_radius();
  const double scale = std::abs(spectrum.autocov_iso(0.0));
  const double floor_ = 1e-8 * scale * (1.0 + srad);

  const Vec slope = kappa / b;  // transverse path point is slope * zeta

  // Stay inside the support radius even with the stencil offsets attached:
  // tabulated media reject queries beyond their table, and the tail they cut
  // off is below their own negligibility threshold anyway.
  const double zeta_hi =
      (srad - 6.0 * h) / std::sqrt(1.0 + slope.squaredNorm());
  require(zeta_hi > 0.0, ErrorCode::domain,
          "medium support radius too small for the stencil");

  // Hessian of the autocovariance along the path, one entry at a time.
  const auto hess_entry = [&](int j, int l, double zeta) {
    const TransFn f = [&](const Vec& r) {
      return spectrum.autocovariance(r, zeta);
    };
    const Vec r0 = slope * zeta;
    if (j == l) {
      Vec e = Vec::Zero();
      e[j] = 1.0;
      return dir2(f, r0, e, h);
    }
    return mixed2(f, r0, h);
  };

  // All integrands are even in zeta (the path point flips sign with zeta and
  // the autocovariance is centrally symmetric), so integrate one side.  The
  // loose tolerance matches the stencil noise floor; tighter requests just
  // make the quadrature chase differencing artifacts.
  const auto integrate_even = [&](const std::function<double(double)>& fn) {
    return 2.0 * integrate(fn, 0.0, zeta_hi, 1e-3, floor_);
  };

  DiffusionCoeffs out;
  out.kappa = kappa;

  Eigen::Matrix2d hess_int = Eigen::Matrix2d::Zero();
  for (int j = 0; j < d; ++j) {
    for (int l = j; l < d; ++l) {
      hess_int(j, l) = integrate_even(
          [&](double zeta) { return hess_entry(j, l, zeta); });
      hess_int(l, j) = hess_int(j, l);
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int l = 0; l < d; ++l) {
      out.a(j, l) = -alpha2 / (8.0 * b * b) * hess_int(j, l);
    }
  }

  // Drift: first term contracts the third derivatives with the Hessian of
  // beta, sum_lm d2beta_lm d3_jlm R = d_j [ -(b^2 Lap + (kappa.grad)^2) R / b^3 ].
  const double kn = kappa.norm();
  const Vec ek = kn > 0.0 ? Vec(kappa / kn) : Vec(1.0, 0.0);
  const auto lf = [&](const Vec& r, double zeta) {
    const TransFn f = [&](const Vec& rr) {
      return spectrum.autocovariance(rr, zeta);
    };
    double lap = 0.0;
    for (int j = 0; j < d; ++j) {
      Vec e = Vec::Zero();
      e[j] = 1.0;
      lap += dir2(f, r, e, h);
    }
    double dir = kn > 0.0 ? kn * kn * dir2(f, r, ek, h) : 0.0;
    return -(b * b * lap + dir) / (b * b * b);
  };

  for (int j = 0; j < d; ++j) {
    Vec e = Vec::Zero();
    e[j] = 1.0;
    double term1;
    if (d == 1) {
      // one dimension collapses to plain derivatives of the radial profile
      term1 = integrate_even([&](double zeta) {
        const auto g = [&](double a) {
          return spectrum.autocovariance(slope * zeta + (a * h) * e, zeta);
        };
        return zeta * dir3(g, h) * (-1.0 / (b * b * b));
      });
    } else {
      term1 = integrate_even([&](double zeta) {
        const Vec r0 = slope * zeta;
        const auto g = [&](double a) { return lf(r0 + (a * h) * e, zeta); };
        return zeta * dir1(g, h);
      });
    }
    double term2 = 0.0;
    for (int l = 0; l < d; ++l) {
      term2 += kappa[l] * hess_int(j, l);
    }
    out.b[j] = alpha2 / (8.0 * b * b) * term1 -
               alpha2 / (4.0 * b * b * b * b) * term2;
  }
  return out;
}

}  // namespace

DiffusionCoeffs diffusion_coeffs(const TransportParams& params,
                                 const MediumSpectrum& spectrum,
                                 const Vec& kappa) {
  params.validate();
  check_medium(params, spectrum);
  require(kappa.norm() < 1.0, ErrorCode::domain,
          "kappa must lie strictly inside the unit cone");

  DiffusionCoeffs out = spectrum.kind() == SpectrumKind::gaussian_isotropic
                            ? gaussian_coeffs(params, spectrum, kappa)
                            : fd_coeffs(params, spectrum, kappa);

  // enforce exact symmetry and check positive semidefiniteness
  Eigen::Matrix2d sym = 0.5 * (out.a + out.a.transpose());
  out.a = sym;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sym);
  const double emax = std::max(es.eigenvalues().maxCoeff(), 0.0);
  require(es.eigenvalues().minCoeff() >= -1e-10 * emax - 1e-300,
          ErrorCode::domain, "diffusion tensor is not positive semidefinite");
  return out;
}

double paraxial_diffusion_coeff(const TransportParams& params,
                                const MediumSpectrum& spectrum) {
  params.validate();
  check_medium(params, spectrum);
  check_resolvable(spectrum, kFdStep);
  // keep a margin so the y-stencil probes stay inside the tabulated support
  const double srad = spectrum.support_radius() * 0.99;
  const double scale = std::abs(spectrum.autocov_iso(0.0));

  // D_res = -(alpha^2/4) int_0^inf R'(s)/s ds for isotropic statistics, for
  // any d (the off-diagonal entries vanish and the diagonal is this scalar).
  // R'(s)/s = 2 phi'(s^2) with phi(y) = R(sqrt(y)), which stays well behaved
  // through s = 0.
  const auto phi = [&](double y) {
    return spectrum.autocov_iso(std::sqrt(std::max(y, 0.0)));
  };
  const auto u = [&](double s) {
    const double y = s * s;
    const double h = 4e-3 * (0.05 + y);
    double dphi;
    if (y > 2.0 * h) {
      dphi = (phi(y - 2 * h) - 8 * phi(y - h) + 8 * phi(y + h) -
              phi(y + 2 * h)) /
             (12 * h);
    } else {
      const double hf = 2e-4;
      dphi = (-25 * phi(y) + 48 * phi(y + hf) - 36 * phi(y + 2 * hf) +
              16 * phi(y + 3 * hf) - 3 * phi(y + 4 * hf)) /
             (12 * hf);
    }
    return 2.0 * dphi;
  };
  // analytic media give a noise-free integrand, the others are limited by
  // their own interpolation / quadrature error
  const bool smooth = spectrum.kind() == SpectrumKind::gaussian_isotropic;
  const double integral =
      integrate(u, 0.0, srad, smooth ? 1e-9 : 1e-5,
                (smooth ? 1e-12 : 1e-7) * scale * (1.0 + srad));
  return -params.alpha * params.alpha / 4.0 * integral;
}

std::vector<IntensityField> solve_kappa_diffusion(
    const TransportParams& params, const std::vector<DiffusionCoeffs>& coeffs,
    double gamma, const IntensityField& i0, const std::vector<double>& z_targets,
    const KappaDiffusionOptions& options) {
  params.validate();
  require(params.d == 1, ErrorCode::unsupported,
          "the kappa-diffusion solver is implemented for d = 1");
  require(static_cast<bool>(i0.grid), ErrorCode::invalid_argument,
          "intensity field has no grid");
  const auto n = static_cast<Eigen::Index>(i0.grid->size());
  require(n >= 3, ErrorCode::invalid_argument, "need at least 3 nodes");
  require(i0.values.size() == n, ErrorCode::invalid_argument,
          "field values size mismatch");
  require(coeffs.size() == i0.grid->size(), ErrorCode::invalid_argument,
          "one DiffusionCoeffs entry per grid node is required");
  require(std::isfinite(gamma) && gamma >= 0.0, ErrorCode::invalid_argument,
          "gamma must be finite and nonnegative");
  require(!z_targets.empty(), ErrorCode::invalid_argument, "z_targets empty");
  double prev = i0.z;
  for (double zt : z_targets) {
    require(std::isfinite(zt) && zt >= prev, ErrorCode::invalid_argument,
            "z_targets must be non-decreasing and start at or after i0.z");
    prev = zt;
  }
  // rk4's explicit stability region allows ~0.69 h^2 / (gamma A); everything
  // above 0.6 is treated as a requested CFL violation.
  require(options.cfl > 0.0 && options.cfl <= 0.6, ErrorCode::range,
          "CFL violation: options.cfl must lie in (0, 0.6]");
  {
    const double vmax = std::max(i0.values.maxCoeff(), 0.0);
    require(i0.values.minCoeff() >= -1e-14 * vmax, ErrorCode::invalid_argument,
            "initial intensity must be nonnegative");
  }

  // sort nodes along kappa_x so the stencil is well defined
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](Eigen::Index a, Eigen::Index b) {
    return i0.grid->nodes[static_cast<std::size_t>(a)].x() <
           i0.grid->nodes[static_cast<std::size_t>(b)].x();
  });

  Eigen::VectorXd a(n), bdrift(n), v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]);
    const DiffusionCoeffs& c = coeffs[src];
    require((c.kappa - i0.grid->nodes[src]).norm() <= 1e-12,
            ErrorCode::invalid_argument,
            "coeffs[i].kappa must match the grid node it belongs to");
    require(c.a(0, 0) >= 0.0, ErrorCode::domain,
            "diffusion coefficient must be nonnegative");
    a[i] = c.a(0, 0);
    bdrift[i] = c.b.x();
    v[i] = i0.values[static_cast<Eigen::Index>(src)];
  }

  // uniform spacing is what makes the flux form exactly conservative in the
  // grid weights
  const double h = i0.grid->nodes[static_cast<std::size_t>(perm[1])].x() -
                   i0.grid->nodes[static_cast<std::size_t>(perm[0])].x();
  require(h > 0.0, ErrorCode::invalid_argument, "grid nodes must be distinct");
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double hi =
        i0.grid->nodes[static_cast<std::size_t>(perm[static_cast<std::size_t>(i) + 1])].x() -
        i0.grid->nodes[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])].x();
    require(std::abs(hi - h) <= 1e-9 * h, ErrorCode::invalid_argument,
            "solve_kappa_diffusion requires a uniform kappa window grid");
  }

  // Interface fluxes F = gamma A dI/dkappa + gamma^2 B I; their divergence
  // telescopes, so sum_i h I_i is conserved to rounding with zero-flux edges.
  Eigen::VectorXd flux(n + 1);
  const auto rhs = [&](const Eigen::VectorXd& y) {
    flux[0] = 0.0;
    flux[n] = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double am = 0.5 * (a[i] + a[i + 1]);
      const double bm = 0.5 * (bdrift[i] + bdrift[i + 1]);
      flux[i + 1] = gamma * am * (y[i + 1] - y[i]) / h +
                    gamma * gamma * bm * 0.5 * (y[i] + y[i + 1]);
    }
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      out[i] = (flux[i + 1] - flux[i]) / h;
    }
    return out;
  };

  const double amax = a.maxCoeff();
  const double bmax = bdrift.cwiseAbs().maxCoeff();
  const double z_scale = params.k / two_pi;  // range -> wavelength units

  std::vector<IntensityField> out_fields;
  out_fields.reserve(z_targets.size());
  double z = i0.z;
  for (double zt : z_targets) {
    const double length = (zt - z) * z_scale;
    if (length > 0.0 && gamma > 0.0 && (amax > 0.0 || bmax > 0.0)) {
      double dz = std::numeric_limits<double>::infinity();
      if (amax > 0.0) dz = std::min(dz, options.cfl * h * h / (gamma * amax));
      if (bmax > 0.0) {
        dz = std::min(dz, options.cfl * h / (gamma * gamma * bmax));
      }
      const double n_est = std::ceil(length / dz - 1e-9);
      require(n_est < 1e9, ErrorCode::range,
              "step-size underflow: segment needs too many steps");
      const auto n_steps = std::max(1L, static_cast<long>(n_est));
      const double hz = length / static_cast<double>(n_steps);
      for (long s = 0; s < n_steps; ++s) {
        const Eigen::VectorXd k1 = rhs(v);
        const Eigen::VectorXd k2 = rhs(v + 0.5 * hz * k1);
        const Eigen::VectorXd k3 = rhs(v + 0.5 * hz * k2);
        const Eigen::VectorXd k4 = rhs(v + hz * k3);
        v += (hz / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    z = zt;

    IntensityField field;
    field.grid = i0.grid;
    field.z = zt;
    field.values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      field.values[perm[static_cast<std::size_t>(i)]] = v[i];
    }
    const double vmax = std::max(field.values.maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (field.values[i] < 0.0) {
        require(field.values[i] >= -1e-14 * vmax, ErrorCode::instability,
                "negative intensity beyond the rounding transient");
        field.values[i] = 0.0;
      }
    }
    out_fields.push_back(std::move(field));
  }
  return out_fields;
}

}  // namespace owrte
