#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "owrte/geometry.hpp"

using namespace owrte;
using owrte_tests::code_of;
using owrte_tests::rel_dev;

namespace {

TransportParams params_1d(double k_ell, double kappa_max = 0.0) {
  TransportParams p;
  p.k = two_pi;
  p.ell = k_ell / p.k;
  p.alpha = 0.05;
  p.d = 1;
  p.kappa_max = kappa_max;
  p.finalize();
  return p;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("beta closed values and the evanescent wall") {
  CHECK(beta(Vec(0.0, 0.0)) == 1.0);
  CHECK(rel_dev(beta(Vec(0.6, 0.0)), 0.8) < 1e-15);
  CHECK(rel_dev(beta(Vec(0.6 / std::sqrt(2.0), 0.6 / std::sqrt(2.0))), 0.8) <
        1e-15);
  CHECK(code_of([] { beta(Vec(1.0, 0.0)); }) == ErrorCode::domain);
  CHECK(code_of([] { beta(Vec(0.9, 0.9)); }) == ErrorCode::domain);
}

TEST_CASE("grad_beta closed values and finite differences") {
  CHECK(grad_beta(Vec(0.0, 0.0)) == Vec(0.0, 0.0));
  const Vec g = grad_beta(Vec(0.6, 0.0));
  CHECK(rel_dev(g.x(), -0.75) < 1e-15);
  CHECK(g.y() == 0.0);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-0.63, 0.63);
  const double h = 1e-5;
  for (int t = 0; t < 100; ++t) {
    const Vec kappa(u(rng), u(rng));  // |kappa| <= 0.9
    const Vec grad = grad_beta(kappa);
    for (int c = 0; c < 2; ++c) {
      Vec hi = kappa, lo = kappa;
      hi[c] += h;
      lo[c] -= h;
      const double fd = (beta(hi) - beta(lo)) / (2.0 * h);
      CHECK(std::abs(grad[c] - fd) < 1e-6);
    }
  }
}

TEST_CASE("beta decreases strictly with |kappa|") {
  double prev = beta(Vec(0.0, 0.0));
  for (double x = 0.05; x < 0.99; x += 0.05) {
    const double b = beta(Vec(x, 0.0));
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("1d grid measure, moments, and mirror symmetry") {
  const TransportParams p = params_1d(two_pi, 0.8);
  const AngularGrid grid = make_grid_1d(p, 64);
  REQUIRE(grid.size() == 64);
  const double unit = p.k / two_pi;  // measure k dkappa / (2 pi)

  double wsum = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    wsum += grid.weights[i];
    m2 += grid.weights[i] * grid.nodes[i].squaredNorm();
    CHECK(grid.nodes[i].norm() <= grid.kappa_max);
    CHECK(grid.weights[i] > 0.0);
    CHECK(grid.beta_at(i) == beta(grid.nodes[i]));
  }
  CHECK(rel_dev(wsum, unit * 1.6) < 1e-12);
  CHECK(rel_dev(wsum, grid.total_weight()) < 1e-15);
  CHECK(rel_dev(m2, unit * 2.0 * std::pow(0.8, 3) / 3.0) < 1e-12);

  // negation symmetry with bitwise equal weights
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t j = grid.nearest(-grid.nodes[i]);
    CHECK(grid.nodes[j] == -grid.nodes[i]);
    CHECK(grid.weights[j] == grid.weights[i]);
  }
}

TEST_CASE("2d grid covers the disk") {
  TransportParams p;
  p.k = two_pi;
  p.ell = 3.0;
  p.alpha = 0.05;
  p.d = 2;
  p.kappa_max = 0.8;
  p.finalize();
  const AngularGrid grid = make_grid_2d(p, 32, 64);
  REQUIRE(grid.size() == 32 * 64);
  const double unit = std::pow(p.k / two_pi, 2);

  double wsum = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    wsum += grid.weights[i];
    m2 += grid.weights[i] * grid.nodes[i].squaredNorm();
  }
  CHECK(rel_dev(wsum, unit * pi * 0.64) < 1e-10);
  // \int |kappa|^2 over the disk = 2 pi kappa_M^4 / 4
  CHECK(rel_dev(m2, unit * two_pi * std::pow(0.8, 4) / 4.0) < 1e-12);

  for (std::size_t i = 0; i < grid.size(); i += 97) {
    const std::size_t j = grid.nearest(-grid.nodes[i]);
    CHECK((grid.nodes[j] + grid.nodes[i]).norm() < 1e-14);
    CHECK(grid.weights[j] == grid.weights[i]);
  }
}

TEST_CASE("uniform window grid for the paraxial solvers") {
  const TransportParams p = params_1d(20.0);
  const AngularGrid grid = make_uniform_grid_1d(p, 0.35, 256);
  REQUIRE(grid.size() == 256);
  double wsum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) wsum += grid.weights[i];
  CHECK(rel_dev(wsum, (p.k / two_pi) * 0.7) < 1e-12);
  // uniform spacing
  const double h0 = grid.nodes[1].x() - grid.nodes[0].x();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    CHECK(std::abs(grid.nodes[i + 1].x() - grid.nodes[i].x() - h0) <
          1e-12 * h0);
  }
}

TEST_CASE("default cone pulls in 5% from the marginal cutoff") {
  const TransportParams p = params_1d(two_pi);
  const double expect = 0.95 * std::sqrt(1.0 - 1.0 / std::pow(two_pi, 2));
  CHECK(rel_dev(p.kappa_max, expect) < 1e-12);
  CHECK(rel_dev(default_kappa_max(two_pi), expect) < 1e-12);
  CHECK(p.k_ell() == two_pi);
  CHECK(rel_dev(p.gamma(), 1.0) < 1e-15);
}

TEST_CASE("parameter validation guards the regime") {
  TransportParams p;
  p.k = 1.0;
  p.ell = 0.5;  // k ell <= 1: not forward peaked
  p.alpha = 0.05;
  p.d = 1;
  CHECK(code_of([&] { p.finalize(); }) == ErrorCode::domain);

  TransportParams q;
  q.k = two_pi;
  q.ell = 1.0;
  q.alpha = 0.05;
  q.d = 1;
  q.kappa_max = 1.5;
  CHECK(code_of([&] { q.finalize(); }) == ErrorCode::domain);

  q.kappa_max = 0.999;  // k ell beta(kappa_max) < 1 at k ell = 2 pi
  CHECK(code_of([&] { q.finalize(); }) == ErrorCode::domain);

  TransportParams r = params_1d(5.0);
  r.alpha = -1.0;
  CHECK(code_of([&] { r.validate(); }) != ErrorCode::ok);
}

TEST_CASE("grid resolution floor") {
  const TransportParams p = params_1d(5.0);
  CHECK(code_of([&] { make_grid_1d(p, 7); }) == ErrorCode::config);
  TransportParams p2 = p;
  p2.d = 2;
  p2.kappa_max = 0.0;
  p2.finalize();
  CHECK(code_of([&] { make_grid_2d(p2, 7, 16); }) == ErrorCode::config);
  CHECK(code_of([&] { make_grid_2d(p2, 16, 7); }) == ErrorCode::config);
  // odd angular counts round up so the node set closes under negation
  CHECK(make_grid_2d(p2, 16, 15).size() == 16 * 16);
}

TEST_CASE("nearest node lookup") {
  const TransportParams p = params_1d(5.0, 0.8);
  const AngularGrid grid = make_grid_1d(p, 32);
  const Vec probe(0.33, 0.0);
  const std::size_t i = grid.nearest(probe);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK((grid.nodes[i] - probe).norm() <= (grid.nodes[j] - probe).norm());
  }
}

}  // TEST_SUITE
