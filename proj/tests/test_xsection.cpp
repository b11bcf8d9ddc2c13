#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "owrte/quadrature.hpp"
#include "owrte/xsection.hpp"

using namespace owrte;
using owrte_tests::code_of;
using owrte_tests::rel_dev;

namespace {

TransportParams gauss_params(double k_ell, double alpha = 0.1, int d = 1) {
  TransportParams p;
  p.k = two_pi;
  p.ell = k_ell / p.k;
  p.alpha = alpha;
  p.d = d;
  p.finalize();
  return p;
}

}  // namespace

TEST_SUITE("xsection") {

TEST_CASE("on-axis kernel closed value") {
  // k = 2 pi, ell = 2, alpha = 0.1, Gaussian: Q(0,0) = 0.01 (2 pi)^3
  TransportParams p;
  p.k = two_pi;
  p.ell = 2.0;
  p.alpha = 0.1;
  p.d = 1;
  p.finalize();
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  const double q00 = diff_xsection(p, g, Vec(0.0, 0.0), Vec(0.0, 0.0));
  CHECK(rel_dev(q00, 0.01 * std::pow(two_pi, 3)) < 1e-13);
}

TEST_CASE("kernel is symmetric and forward peaked") {
  const TransportParams p = gauss_params(20.0);
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  const Vec a(0.25, 0.0), b(-0.1, 0.0);
  CHECK(diff_xsection(p, g, a, b) == diff_xsection(p, g, b, a));

  const double diag = diff_xsection(p, g, Vec(0.0, 0.0), Vec(0.0, 0.0));
  const double off = diff_xsection(p, g, Vec(0.4, 0.0), Vec(0.0, 0.0));
  CHECK(off / diag < 1e-10);
}

TEST_CASE("kernel scales with alpha squared") {
  const TransportParams p1 = gauss_params(5.0, 0.05);
  const TransportParams p2 = gauss_params(5.0, 0.10);
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  const Vec a(0.2, 0.0), b(0.1, 0.0);
  CHECK(rel_dev(diff_xsection(p2, g, a, b), 4.0 * diff_xsection(p1, g, a, b)) <
        1e-15);

  const AngularGrid grid = make_grid_1d(p1, 64);
  const double s1 = total_xsection(p1, g, a, grid);
  const double s2 = total_xsection(p2, g, a, grid);
  CHECK(rel_dev(s2, 4.0 * s1) < 1e-14);
  CHECK(rel_dev(mean_free_path(p2, g, a, grid),
                0.25 * mean_free_path(p1, g, a, grid)) < 1e-14);
}

TEST_CASE("total cross section is stable under grid refinement") {
  const TransportParams p = gauss_params(5.0);
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  const AngularGrid coarse = make_grid_1d(p, 128);
  const AngularGrid fine = make_grid_1d(p, 256);
  for (double x : {0.0, 0.3, 0.6}) {
    const Vec kappa(x, 0.0);
    const double sc = total_xsection(p, g, kappa, coarse);
    const double sf = total_xsection(p, g, kappa, fine);
    CHECK(rel_dev(sc, sf) < 1e-6);
    CHECK(rel_dev(mean_free_path(p, g, kappa, fine), 2.0 / sf) < 1e-15);
  }
}

TEST_CASE("complex exponent: real part ties to Sigma, imaginary part is grid free") {
  const TransportParams p = gauss_params(5.0);
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  const AngularGrid grid = make_grid_1d(p, 96);
  const AngularGrid grid2 = make_grid_1d(p, 192);
  for (double x : {0.0, 0.45}) {
    const Vec kappa(x, 0.0);
    const std::complex<double> q = q_exponent(p, g, kappa, grid);
    CHECK(rel_dev(q.real(), -0.5 * total_xsection(p, g, kappa, grid)) < 1e-14);
    // cross-grid: quadrature-level agreement only
    CHECK(rel_dev(q.real(), -0.5 * total_xsection(p, g, kappa, grid2)) < 1e-6);
    // the zeta quadrature never sees the grid
    const std::complex<double> q2 = q_exponent(p, g, kappa, grid2);
    CHECK(rel_dev(q.imag(), q2.imag()) < 1e-12);
    CHECK(q.imag() != 0.0);
  }
}

TEST_CASE("high-frequency mean free path asymptotics") {
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  // S_hf(kappa) / S_hf(0) = beta(kappa) exactly
  const TransportParams p = gauss_params(50.0);
  const Vec kappa(0.6, 0.0);
  CHECK(rel_dev(mfp_highfreq(p, g, kappa) / mfp_highfreq(p, g, Vec(0.0, 0.0)),
                beta(kappa)) < 1e-14);

  // doubling k at fixed k*ell halves the asymptote exactly
  TransportParams p2 = p;
  p2.k = 2.0 * p.k;
  p2.ell = 0.5 * p.ell;
  CHECK(rel_dev(mfp_highfreq(p2, g, kappa), 0.5 * mfp_highfreq(p, g, kappa)) <
        1e-14);

  // at k ell = 50 the exact mfp sits within 1e-3 of the asymptote
  const AngularGrid grid = make_grid_1d(p, 256);
  const double exact = mean_free_path(p, g, Vec(0.0, 0.0), grid);
  CHECK(rel_dev(exact, mfp_highfreq(p, g, Vec(0.0, 0.0))) < 1e-3);
}

TEST_CASE("cross-section table invariants") {
  const TransportParams p = gauss_params(5.0);
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  auto grid = std::make_shared<AngularGrid>(make_grid_1d(p, 64));
  const CrossSectionTable table = build_xsection_table(p, g, grid);

  REQUIRE(table.size() == 64);
  CHECK((table.q_matrix - table.q_matrix.transpose()).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(table.q_matrix.minCoeff() > 0.0);

  Eigen::Map<const Eigen::VectorXd> w(grid->weights.data(), 64);
  const Eigen::VectorXd sigma_q = table.q_matrix * w;
  CHECK((sigma_q - table.sigma).cwiseAbs().maxCoeff() <
        1e-12 * table.sigma.maxCoeff());
  for (int i = 0; i < 64; ++i) {
    CHECK(table.mfp[i] == 2.0 / table.sigma[i]);
    CHECK(rel_dev(table.q_exponent[i].real(), -0.5 * table.sigma[i]) < 1e-14);
    CHECK(table.q_matrix(i, i) ==
          diff_xsection(p, g, grid->nodes[i], grid->nodes[i]));
  }
  CHECK(table.min_mfp() <= table.max_mfp());
  CHECK(table.max_sigma() == table.sigma.maxCoeff());

  // skipping the zeta quadratures leaves Re Q only
  TableOptions fast;
  fast.compute_imag_q = false;
  const CrossSectionTable t2 = build_xsection_table(p, g, grid, fast);
  for (int i = 0; i < 64; ++i) {
    CHECK(t2.q_exponent[i].imag() == 0.0);
    CHECK(t2.sigma[i] == table.sigma[i]);
  }
}

TEST_CASE("table rejects grids beyond the dense-storage cap") {
  const TransportParams p = gauss_params(5.0);
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  auto big = std::make_shared<AngularGrid>(make_grid_1d(p, 520));
  TableOptions fast;
  fast.compute_imag_q = false;
  CHECK(code_of([&] { build_xsection_table(p, g, big, fast); }) ==
        ErrorCode::config);
}

TEST_CASE("Henyey-Greenstein identification for the Lorentzian medium") {
  const TransportParams p = gauss_params(5.0);
  const MediumSpectrum lor = MediumSpectrum::lorentzian2d(1.0, 1e3);

  const HGParams hg = hg_params(5.0, 1.0, p);
  CHECK(rel_dev(hg.g, 0.8190024875775822) < 1e-13);
  CHECK(hg.mu_s > 0.0);

  // mu_s is the full scattering rate: integrating the arc-length kernel over
  // the angle difference must reproduce it (p_g is normalized).
  auto arc_kernel = [&](double delta) {
    const Vec kappa(std::sin(0.5 * delta), 0.0);
    const Vec kappa_prime(-std::sin(0.5 * delta), 0.0);
    const double b = std::cos(0.5 * delta);
    return diff_xsection(p, lor, kappa, kappa_prime) * p.k * b * b / two_pi;
  };
  const double total = 2.0 * integrate(arc_kernel, 0.0, pi, 1e-11);
  CHECK(rel_dev(total, hg.mu_s) < 1e-8);

  CHECK(verify_hg_identification(p, lor, 1.0, 360) < 1e-10);

  // r0 rescales mu_s linearly and leaves g untouched
  const HGParams hg3 = hg_params(5.0, 3.0, p);
  CHECK(hg3.g == hg.g);
  CHECK(rel_dev(hg3.mu_s, 3.0 * hg.mu_s) < 1e-15);

  // strong forward peaking at high frequency: 1 - g <= 2 / (k ell)
  CHECK(1.0 - hg_params(1e3, 1.0, p).g <= 2e-3);
}

TEST_CASE("HG phase function normalization and shape") {
  auto mass = [](double g) {
    return integrate([g](double t) { return hg_phase(g, t); }, 0.0, two_pi,
                     1e-13);
  };
  CHECK(std::abs(mass(0.0) - 1.0) < 1e-12);
  CHECK(std::abs(mass(0.5) - 1.0) < 1e-12);
  CHECK(std::abs(mass(0.95) - 1.0) < 1e-12);
  CHECK(rel_dev(hg_phase(0.5, 0.0) / hg_phase(0.5, pi), 9.0) < 1e-14);
  CHECK(code_of([] { hg_phase(1.0, 0.0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("HG identification rejects media it does not cover") {
  const TransportParams p = gauss_params(5.0);
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  CHECK(code_of([&] { verify_hg_identification(p, g, 1.0, 16); }) ==
        ErrorCode::config);
  // cutoff below 2 k ell invalidates the closed form
  const MediumSpectrum tight = MediumSpectrum::lorentzian2d(1.0, 8.0);
  CHECK(code_of([&] { verify_hg_identification(p, tight, 1.0, 16); }) ==
        ErrorCode::config);
  const TransportParams p2 = gauss_params(5.0, 0.1, 2);
  const MediumSpectrum g3 = MediumSpectrum::gaussian(1.0, 3);
  CHECK(code_of([&] { verify_hg_identification(p2, g3, 1.0, 16); }) ==
        ErrorCode::unsupported);
}

TEST_CASE("reduction of the standard transport kernel in three dimensions") {
  const TransportParams p = gauss_params(5.0, 0.1, 2);
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 3);

  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  for (int t = 0; t < 100; ++t) {
    const Vec a(u(rng), u(rng)), b(u(rng), u(rng));
    CHECK(verify_rte3d_reduction(p, g, a, b) < 1e-12);
    // the wave speed cancels identically
    CHECK(verify_rte3d_reduction(p, g, a, b, 3.0e8) < 1e-12);
  }

  // rotation invariance of the d = 2 kernel
  const double c = std::cos(0.7), s = std::sin(0.7);
  auto rot = [&](const Vec& v) { return Vec(c * v.x() - s * v.y(), s * v.x() + c * v.y()); };
  const Vec a(0.3, -0.2), b(-0.1, 0.4);
  CHECK(rel_dev(diff_xsection(p, g, rot(a), rot(b)),
                diff_xsection(p, g, a, b)) < 1e-13);

  const TransportParams p1 = gauss_params(5.0);
  const MediumSpectrum g2 = MediumSpectrum::gaussian(1.0, 2);
  CHECK(code_of([&] {
          verify_rte3d_reduction(p1, g2, Vec(0.1, 0.0), Vec(0.2, 0.0));
        }) == ErrorCode::unsupported);
}

}  // TEST_SUITE
