#include <cmath>
#include <limits>
#include <memory>

#include "doctest.h"
#include "helpers.hpp"
#include "owrte/transport.hpp"

using namespace owrte;
using owrte_tests::code_of;
using owrte_tests::rel_dev;

namespace {

TransportParams gauss_params(double k_ell, int d = 1) {
  TransportParams p;
  p.k = two_pi;
  p.ell = k_ell / p.k;
  p.alpha = 0.1;
  p.d = d;
  p.finalize();
  return p;
}

CrossSectionTable zero_table(std::shared_ptr<const AngularGrid> grid,
                             const TransportParams& params) {
  CrossSectionTable t;
  t.params = params;
  t.grid = std::move(grid);
  const auto n = static_cast<Eigen::Index>(t.grid->size());
  t.q_matrix = Eigen::MatrixXd::Zero(n, n);
  t.sigma = Eigen::VectorXd::Zero(n);
  t.mfp = Eigen::VectorXd::Constant(
      n, std::numeric_limits<double>::infinity());
  return t;
}

void fill_gaussian_x(WignerField& field, double x0, double sx) {
  for (std::size_t i = 0; i < field.grid->size(); ++i) {
    for (int ix = 0; ix < field.cells[0]; ++ix) {
      const double u = (field.x_coord(0, ix) - x0) / sx;
      field.at(i, ix) = std::exp(-0.5 * u * u);
    }
  }
}

}  // namespace

TEST_SUITE("wigner") {

TEST_CASE("field bookkeeping: coordinates, totals, indexing") {
  const TransportParams p = gauss_params(5.0);
  auto grid = std::make_shared<AngularGrid>(make_grid_1d(p, 16));
  WignerField f = make_wigner_field(grid, {4.0, 0.0}, {8, 0});
  CHECK(f.spatial_cells() == 8);
  CHECK(f.cell_volume() == 0.5);
  CHECK(f.x_coord(0, 0) == -1.75);
  CHECK(f.x_coord(0, 7) == 1.75);
  CHECK(code_of([&] { f.x_coord(1, 0); }) == ErrorCode::invalid_argument);
  CHECK(code_of([&] { f.x_coord(0, 8); }) == ErrorCode::invalid_argument);

  f.at(3, 2) = 4.0;
  CHECK(f.values[3 * 8 + 2] == 4.0);
  const double expect = grid->weights[3] * 4.0 * f.cell_volume();
  CHECK(rel_dev(f.total(), expect) < 1e-15);
  const IntensityField marg = f.marginal_kappa();
  CHECK(marg.values[3] == 4.0 * f.cell_volume());
  CHECK(marg.values[2] == 0.0);

  CHECK(code_of([&] { f.at(16, 0); }) == ErrorCode::invalid_argument);
  CHECK(code_of([&] { f.at(0, 8); }) == ErrorCode::invalid_argument);
  CHECK(code_of([&] { make_wigner_field(grid, {4.0, 0.0}, {8, 4}); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([&] { make_wigner_field(grid, {-1.0, 0.0}, {8, 0}); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("free transport rides the characteristics exactly") {
  const TransportParams p = gauss_params(5.0);
  auto grid = std::make_shared<AngularGrid>(make_grid_1d(p, 16));
  const CrossSectionTable table = zero_table(grid, p);

  WignerField w0 = make_wigner_field(grid, {10.0, 0.0}, {256, 0});
  const double x0 = -2.0, sx = 0.3;
  fill_gaussian_x(w0, x0, sx);

  const double z = 0.8;
  const auto out = solve_wigner(table, w0, {z});
  REQUIRE(out.size() == 1);
  double max_dev = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double v = grid->nodes[i].x() / grid->beta_at(i);
    for (int ix = 0; ix < 256; ++ix) {
      const double u = (out[0].x_coord(0, ix) - x0 - v * z) / sx;
      max_dev = std::max(max_dev,
                         std::abs(out[0].at(i, ix) - std::exp(-0.5 * u * u)));
    }
  }
  CHECK(max_dev < 1e-12);
  CHECK(rel_dev(out[0].total(), w0.total()) < 1e-13);
}

TEST_CASE("free transport in two transverse dimensions") {
  const TransportParams p = gauss_params(5.0, 2);
  auto grid = std::make_shared<AngularGrid>(make_grid_2d(p, 8, 8));
  const CrossSectionTable table = zero_table(grid, p);

  WignerField w0 = make_wigner_field(grid, {12.0, 12.0}, {64, 64});
  const double sx = 0.5;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    for (int iy = 0; iy < 64; ++iy) {
      for (int ix = 0; ix < 64; ++ix) {
        const double ux = w0.x_coord(0, ix) / sx;
        const double uy = w0.x_coord(1, iy) / sx;
        w0.at(i, ix, iy) = std::exp(-0.5 * (ux * ux + uy * uy));
      }
    }
  }
  const double z = 0.7;
  const auto out = solve_wigner(table, w0, {z});
  double max_dev = 0.0;
  for (std::size_t i = 0; i < grid->size(); i += 7) {
    const Vec v = grid->nodes[i] / grid->beta_at(i);
    for (int iy = 0; iy < 64; ++iy) {
      for (int ix = 0; ix < 64; ++ix) {
        const double ux = (out[0].x_coord(0, ix) - v.x() * z) / sx;
        const double uy = (out[0].x_coord(1, iy) - v.y() * z) / sx;
        const double expect = std::exp(-0.5 * (ux * ux + uy * uy));
        max_dev = std::max(max_dev, std::abs(out[0].at(i, ix, iy) - expect));
      }
    }
  }
  CHECK(max_dev < 1e-12);
  CHECK(rel_dev(out[0].total(), w0.total()) < 1e-13);
}

TEST_CASE("scattering run conserves mass and matches the angular marginal") {
  const TransportParams p = gauss_params(5.0);
  auto grid = std::make_shared<AngularGrid>(make_grid_1d(p, 32));
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  TableOptions opt;
  opt.compute_imag_q = false;
  const CrossSectionTable table = build_xsection_table(p, g, grid, opt);

  WignerField w0 = make_wigner_field(grid, {40.0, 0.0}, {128, 0});
  fill_gaussian_x(w0, 0.0, 0.8);

  const double s0 =
      table.mfp[static_cast<Eigen::Index>(grid->nearest(Vec(0.0, 0.0)))];
  const auto out = solve_wigner(table, w0, {s0});
  CHECK(std::abs(out[0].total() / w0.total() - 1.0) < 1e-8);
  CHECK(out[0].values.minCoeff() >= 0.0);

  // the x-marginal must follow the angular solver with the same substeps
  WignerOptions wopt;
  const double h_base = table.min_mfp() / wopt.steps_per_mfp;
  const long n_steps = std::max(1L, static_cast<long>(std::ceil(s0 / h_base)));
  AngularOptions aopt;
  aopt.fixed_step = s0 / static_cast<double>(n_steps);

  IntensityField m0 = w0.marginal_kappa();
  const auto angular = solve_angular(table, m0, {s0}, aopt);
  const IntensityField marg = out[0].marginal_kappa();
  CHECK((marg.values - angular[0].values).cwiseAbs().maxCoeff() <
        1e-12 * angular[0].values.maxCoeff());
}

TEST_CASE("point-source peaks track the ballistic characteristics") {
  const TransportParams p = gauss_params(5.0);
  auto grid = std::make_shared<AngularGrid>(make_grid_1d(p, 24));
  const MediumSpectrum g = MediumSpectrum::gaussian(1.0, 2);
  TableOptions opt;
  opt.compute_imag_q = false;
  const CrossSectionTable table = build_xsection_table(p, g, grid, opt);

  const double z = 0.5 * table.min_mfp();
  double vmax = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    vmax = std::max(vmax, std::abs(grid->nodes[i].x()) / grid->beta_at(i));
  }
  const double box = 3.0 * vmax * z + 2.0;
  const int nx = 256;
  const double h = box / nx;

  WignerField w0 = make_wigner_field(grid, {box, 0.0}, {nx, 0});
  fill_gaussian_x(w0, 0.0, 3.0 * h);

  const auto out = solve_wigner(table, w0, {z});
  for (std::size_t i = 0; i < grid->size(); ++i) {
    int best = 0;
    for (int ix = 1; ix < nx; ++ix) {
      if (out[0].at(i, ix) > out[0].at(i, best)) best = ix;
    }
    const double expect = grid->nodes[i].x() / grid->beta_at(i) * z;
    CHECK(std::abs(out[0].x_coord(0, best) - expect) <= 1.5 * h);
  }
}

TEST_CASE("input validation of the wigner solver") {
  const TransportParams p = gauss_params(5.0);
  auto grid = std::make_shared<AngularGrid>(make_grid_1d(p, 16));
  const CrossSectionTable table = zero_table(grid, p);
  WignerField w0 = make_wigner_field(grid, {4.0, 0.0}, {32, 0});
  fill_gaussian_x(w0, 0.0, 0.4);

  CHECK(code_of([&] { solve_wigner(table, w0, {}); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([&] { solve_wigner(table, w0, {0.4, 0.1}); }) ==
        ErrorCode::invalid_argument);

  WignerOptions bad;
  bad.steps_per_mfp = 0;
  CHECK(code_of([&] { solve_wigner(table, w0, {0.5}, bad); }) ==
        ErrorCode::invalid_argument);

  WignerField neg = w0;
  neg.at(0, 3) = -1.0;
  CHECK(code_of([&] { solve_wigner(table, neg, {0.5}); }) ==
        ErrorCode::invalid_argument);

  auto other = std::make_shared<AngularGrid>(make_grid_1d(p, 24));
  WignerField mism = make_wigner_field(other, {4.0, 0.0}, {32, 0});
  CHECK(code_of([&] { solve_wigner(table, mism, {0.5}); }) ==
        ErrorCode::config);
}

}  // TEST_SUITE
