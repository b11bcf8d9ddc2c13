#include <cmath>
#include <complex>
#include <memory>

#include "doctest.h"
#include "helpers.hpp"
#include "owrte/coherent.hpp"

using namespace owrte;
using owrte_tests::code_of;
using owrte_tests::rel_dev;

namespace {

TransportParams gauss_params(double k_ell) {
  TransportParams p;
  p.k = two_pi;
  p.ell = k_ell / p.k;
  p.alpha = 0.1;
  p.d = 1;
  p.finalize();
  return p;
}

}  // namespace

TEST_SUITE("coherent") {

TEST_CASE("source amplitudes: normalization and shape") {
  const TransportParams p = gauss_params(5.0);
  const AngularGrid grid = make_grid_1d(p, 96);

  SourceModel src;
  src.kind = SourceKind::gaussian_beam;
  src.kappa_width = 0.05;
  src.flux = 2.5;
  const Eigen::VectorXcd a = source_amplitudes(src, p, grid);
  REQUIRE(a.size() == 96);

  double flux = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    flux += grid.weights[static_cast<std::size_t>(i)] * std::norm(a[i]);
    // the jump condition makes the amplitude purely imaginary, positive
    CHECK(a[i].real() == 0.0);
    CHECK(a[i].imag() > 0.0);
  }
  CHECK(rel_dev(flux, src.flux) < 1e-13);

  // |a|^2 beta is the angular power profile: a gaussian of std kappa_width
  const std::size_t i0 = grid.nearest(Vec(0.0, 0.0));
  const double p0 = std::norm(a[static_cast<Eigen::Index>(i0)]) *
                    grid.beta_at(i0);
  for (double kx : {0.04, 0.09}) {
    const std::size_t i = grid.nearest(Vec(kx, 0.0));
    const double pk = std::norm(a[static_cast<Eigen::Index>(i)]) *
                      grid.beta_at(i);
    const double kappa2 = grid.nodes[i].squaredNorm() -
                          grid.nodes[i0].squaredNorm();
    CHECK(rel_dev(std::log(pk / p0),
                  -kappa2 / (2.0 * src.kappa_width * src.kappa_width)) <
          1e-10);
  }

  // doubling the flux scales amplitudes by sqrt(2)
  SourceModel twice = src;
  twice.flux = 5.0;
  const Eigen::VectorXcd a2 = source_amplitudes(twice, p, grid);
  CHECK(rel_dev(a2[10].imag(), std::sqrt(2.0) * a[10].imag()) < 1e-14);
}

TEST_CASE("source validation") {
  const TransportParams p = gauss_params(5.0);
  const AngularGrid grid = make_grid_1d(p, 32);

  SourceModel wide;
  wide.kappa_width = 0.3;  // 4 sigma exceeds the cone
  CHECK(code_of([&] { source_amplitudes(wide, p, grid); }) ==
        ErrorCode::domain);

  SourceModel bad;
  bad.flux = 0.0;
  CHECK(code_of([&] { source_amplitudes(bad, p, grid); }) ==
        ErrorCode::invalid_argument);

  SourceModel tab;
  tab.kind = SourceKind::tabulated;
  tab.profile_kappa = {0.0, 0.1, 0.05};  // unsorted
  tab.profile_value = {1.0, 0.5, 0.8};
  CHECK(code_of([&] { source_amplitudes(tab, p, grid); }) ==
        ErrorCode::invalid_argument);
  tab.profile_kappa = {0.0, 0.1};
  CHECK(code_of([&] { source_amplitudes(tab, p, grid); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("tabulated profile reproduces the gaussian beam") {
  const TransportParams p = gauss_params(5.0);
  const AngularGrid grid = make_grid_1d(p, 64);

  SourceModel src;
  src.kappa_width = 0.05;

  SourceModel tab;
  tab.kind = SourceKind::tabulated;
  const int m = 2000;
  tab.profile_kappa.resize(m);
  tab.profile_value.resize(m);
  for (int i = 0; i < m; ++i) {
    const double kx = grid.kappa_max * i / (m - 1);
    tab.profile_kappa[static_cast<std::size_t>(i)] = kx;
    tab.profile_value[static_cast<std::size_t>(i)] =
        std::exp(-kx * kx / (4.0 * 0.05 * 0.05));
  }

  const Eigen::VectorXcd a = source_amplitudes(src, p, grid);
  const Eigen::VectorXcd b = source_amplitudes(tab, p, grid);
  const double amax = a.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    // compare where the beam carries mass; the linear interpolant loses
    // relative accuracy deep in the tail
    if (std::abs(a[i]) > 1e-6 * amax) {
      CHECK(rel_dev(b[i].imag(), a[i].imag()) < 1e-3);
    }
  }
}

TEST_CASE("mean amplitude: exponent semigroup and decay rate") {
  const TransportParams p = gauss_params(5.0);
  auto grid = std::make_shared<AngularGrid>(make_grid_1d(p, 64));
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  const CrossSectionTable table = build_xsection_table(p, g, grid);

  SourceModel src;
  src.kappa_width = 0.05;
  const Eigen::VectorXcd a0 = source_amplitudes(src, p, *grid);

  // z = 0 is the identity
  const Eigen::VectorXcd same = mean_amplitude(a0, table, 0.0);
  CHECK((same - a0).cwiseAbs().maxCoeff() == 0.0);

  // the propagator composes
  const Eigen::VectorXcd direct = mean_amplitude(a0, table, 1.7);
  const Eigen::VectorXcd chained =
      mean_amplitude(mean_amplitude(a0, table, 0.6), table, 1.1);
  CHECK((chained - direct).cwiseAbs().maxCoeff() <
        1e-12 * direct.cwiseAbs().maxCoeff());

  // |A(z)| / |a| = e^{-z / S} node by node
  for (Eigen::Index i = 0; i < a0.size(); i += 9) {
    if (std::abs(a0[i]) < 1e-14 * std::abs(a0[32])) continue;
    const double zi = table.mfp[i];
    const Eigen::VectorXcd az = mean_amplitude(a0, table, zi);
    CHECK(rel_dev(std::abs(az[i]) / std::abs(a0[i]), std::exp(-1.0)) < 1e-12);
  }

  Eigen::VectorXcd wrong(10);
  wrong.setZero();
  CHECK(code_of([&] { mean_amplitude(wrong, table, 1.0); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([&] { mean_amplitude(a0, table, -1.0); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("homogeneous field: quadrature convention and behaviour") {
  const TransportParams p = gauss_params(5.0);
  const AngularGrid grid = make_grid_1d(p, 128);
  SourceModel src;
  src.kappa_width = 0.05;
  const Eigen::VectorXcd a0 = source_amplitudes(src, p, grid);

  const Vec x(0.3, 0.0);
  const double z = 2.0;
  const std::complex<double> u = homogeneous_field(a0, p, grid, x, z);

  // independent evaluation of the same plane-wave superposition
  std::complex<double> ref(0.0, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double b = grid.beta_at(i);
    const double phase = p.k * (grid.nodes[i].x() * x.x() + b * z);
    ref += grid.weights[i] *
           (a0[static_cast<Eigen::Index>(i)] / std::sqrt(b)) *
           std::exp(std::complex<double>(0.0, phase));
  }
  CHECK(std::abs(u - ref) <= 1e-13 * std::abs(ref));

  // linear in the amplitudes
  const std::complex<double> u2 = homogeneous_field(2.0 * a0, p, grid, x, z);
  CHECK(std::abs(u2 - 2.0 * u) < 1e-13 * std::abs(u));

  // grid refinement has converged
  const AngularGrid fine = make_grid_1d(p, 256);
  const Eigen::VectorXcd af = source_amplitudes(src, p, fine);
  const std::complex<double> uf = homogeneous_field(af, p, fine, x, z);
  CHECK(std::abs(u - uf) < 1e-6 * std::abs(uf));

  // beam diffraction: on-axis magnitude decreases monotonically with range
  double prev = std::abs(homogeneous_field(a0, p, grid, Vec(0.0, 0.0), 1.0));
  for (double zz : {20.0, 40.0, 80.0}) {
    const double cur =
        std::abs(homogeneous_field(a0, p, grid, Vec(0.0, 0.0), zz));
    CHECK(cur < prev);
    prev = cur;
  }

  CHECK(code_of([&] { homogeneous_field(a0, p, grid, x, 0.0); }) ==
        ErrorCode::domain);
  CHECK(code_of([&] { homogeneous_field(a0, p, grid, x, -2.0); }) ==
        ErrorCode::domain);
}

TEST_CASE("backward amplitudes equal the forward ones at a planar source") {
  const TransportParams p = gauss_params(5.0);
  const AngularGrid grid = make_grid_1d(p, 48);
  SourceModel src;
  src.kappa_width = 0.05;
  const Eigen::VectorXcd a = source_amplitudes(src, p, grid);
  const Eigen::VectorXcd b = backward_amplitudes(src, p, grid);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
