#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "owrte/montecarlo.hpp"

using namespace owrte;
using owrte_tests::code_of;
using owrte_tests::rel_dev;

namespace {

TransportParams gauss_params(double k_ell, double alpha = 0.1) {
  TransportParams p;
  p.k = two_pi;
  p.ell = k_ell / p.k;
  p.alpha = alpha;
  p.d = 1;
  p.finalize();
  return p;
}

std::shared_ptr<const CrossSectionTable> make_table(double k_ell, int n,
                                                    double alpha = 0.1) {
  const TransportParams p = gauss_params(k_ell, alpha);
  auto grid = std::make_shared<AngularGrid>(make_grid_1d(p, n));
  TableOptions opt;
  opt.compute_imag_q = false;
  return std::make_shared<CrossSectionTable>(
      build_xsection_table(p, MediumSpectrum::gaussian(1.0, 2), grid, opt));
}

// Wilson-Hilferty approximation of the chi-squared quantile; good to a few
// tenths of a unit at the dof used here, far below the test margins.
double chi2_quantile_999(double dof) {
  const double z = 3.090232306167813;  // Phi^{-1}(0.999)
  const double t = 2.0 / (9.0 * dof);
  const double u = 1.0 - t + z * std::sqrt(t);
  return dof * u * u * u;
}

// Pearson chi-squared with consecutive bins pooled until the expected count
// reaches 10, so far tails do not invalidate the statistic.
struct Chi2Result {
  double stat = 0.0;
  double dof = 0.0;
};
Chi2Result pooled_chi2(const std::vector<double>& counts,
                       const std::vector<double>& probs, double n) {
  Chi2Result r;
  double co = 0.0, eo = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    co += counts[i];
    eo += n * probs[i];
    if (eo >= 10.0) {
      r.stat += (co - eo) * (co - eo) / eo;
      r.dof += 1.0;
      co = 0.0;
      eo = 0.0;
    }
  }
  if (eo > 0.0) {
    r.stat += (co - eo) * (co - eo) / eo;
    r.dof += 1.0;
  }
  r.dof = std::max(1.0, r.dof - 1.0);
  return r;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("rng streams are not shifted copies of each other") {
  // seeding neighbouring streams on an arithmetic progression of states would
  // make stream s+1 reproduce stream s offset by one draw
  for (std::uint64_t seed : {0ULL, 42ULL, 0xdeadbeefULL}) {
    for (std::uint64_t s = 0; s < 50; ++s) {
      SplitMix64 a = SplitMix64::for_stream(seed, s);
      SplitMix64 b = SplitMix64::for_stream(seed, s + 1);
      a.next();
      int collisions = 0;
      for (int k = 0; k < 8; ++k) {
        if (a.next() == b.next()) ++collisions;
      }
      CHECK(collisions == 0);
    }
  }
}

TEST_CASE("alias sampling reproduces the kernel rows") {
  auto table = make_table(2.0, 64);
  const JumpProcess jp(table);

  const std::size_t draws = 400000;
  for (std::int32_t row : {0, 21, 32, 63}) {
    const std::vector<double>& pmf = jp.row_probabilities(row);
    REQUIRE(pmf.size() == 64);
    double mass = 0.0;
    for (double p : pmf) mass += p;
    CHECK(std::abs(mass - 1.0) < 1e-12);

    SplitMix64 rng = SplitMix64::for_stream(1234, static_cast<std::uint64_t>(row));
    std::vector<double> counts(64, 0.0);
    for (std::size_t t = 0; t < draws; ++t) {
      const std::int32_t j = jp.sample_scatter(row, rng);
      REQUIRE(j >= 0);
      REQUIRE(j < 64);
      counts[static_cast<std::size_t>(j)] += 1.0;
    }
    const Chi2Result r =
        pooled_chi2(counts, pmf, static_cast<double>(draws));
    CHECK(r.stat < chi2_quantile_999(r.dof));
  }

  CHECK(code_of([&] {
          SplitMix64 rng(1);
          jp.sample_scatter(64, rng);
        }) == ErrorCode::range);
}

TEST_CASE("ensembles are reproducible from the seed alone") {
  auto table = make_table(5.0, 32);
  const JumpProcess jp(table);
  std::vector<double> law(32, 0.0);
  for (std::size_t i = 10; i < 22; ++i) law[i] = 1.0;

  ParticleEnsemble a = make_ensemble(table->grid, law, 5000, 99);
  ParticleEnsemble b = make_ensemble(table->grid, law, 5000, 99);
  ParticleEnsemble c = make_ensemble(table->grid, law, 5000, 100);

  const double dz = table->max_mfp();
  jp.evolve(a, dz);
  jp.evolve(b, dz);
  jp.evolve(c, dz);

  bool identical = true, distinct = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    identical = identical && a.particles[i].node == b.particles[i].node &&
                a.particles[i].x == b.particles[i].x &&
                a.particles[i].n_scatter == b.particles[i].n_scatter;
    distinct = distinct || a.particles[i].node != c.particles[i].node ||
               a.particles[i].x != c.particles[i].x;
  }
  CHECK(identical);
  CHECK(distinct);
}

TEST_CASE("ballistic limit: vanishing cross section leaves straight flights") {
  auto table = make_table(5.0, 16, 1e-8);
  const JumpProcess jp(table);
  std::vector<double> law(16, 0.0);
  const std::size_t j = table->grid->nearest(Vec(0.5, 0.0));
  law[j] = 1.0;

  ParticleEnsemble ens = make_ensemble(table->grid, law, 20000, 7);
  const double dz = 2.0;
  jp.evolve(ens, dz);

  const Vec kappa = table->grid->nodes[j];
  const double expect_x = kappa.x() / beta(kappa) * dz;
  for (const auto& p : ens.particles) {
    REQUIRE(p.node == static_cast<std::int32_t>(j));
    REQUIRE(p.n_scatter == 0);
    REQUIRE(rel_dev(p.x.x(), expect_x) < 1e-14);
  }

  const CoherentEstimate coh = estimate_coherent(ens);
  CHECK(coh.fraction == 1.0);
  CHECK(coh.std_error == 0.0);
  CHECK(!coh.mixed_start_warning);

  const EnsembleStats stats = ensemble_stats(ens);
  CHECK(stats.mean_n_scatter == 0.0);
  CHECK(stats.kappa_variance == 0.0);
  CHECK(stats.x_variance == 0.0);
}

TEST_CASE("unscattered fraction decays at the total cross section") {
  auto table = make_table(5.0, 64);
  std::vector<double> law(64, 0.0);
  const std::size_t j = table->grid->nearest(Vec(0.0, 0.0));
  law[j] = 1.0;

  ParticleEnsemble ens = make_ensemble(table->grid, law, 200000, 2024);
  const JumpProcess jp(table);
  const double z = table->mfp[static_cast<Eigen::Index>(j)];
  jp.evolve(ens, z);

  const CoherentEstimate coh = estimate_coherent(ens);
  const double expect = std::exp(-2.0);  // sigma * S = 2 by definition
  CHECK(std::abs(coh.fraction - expect) < 4.0 * coh.std_error);
  CHECK(coh.std_error < 1e-3);
  CHECK(!coh.mixed_start_warning);

  // scatter counts are Poisson only per fixed node; still, their mean must
  // sit near sigma_j z within a loose multiple of the standard error
  const EnsembleStats stats = ensemble_stats(ens);
  CHECK(stats.mean_n_scatter > 1.0);
  CHECK(stats.mean_n_scatter < 4.0);

  // spreading the launch nodes flags the coherent estimate
  std::vector<double> wide(64, 1.0);
  ParticleEnsemble mixed = make_ensemble(table->grid, wide, 5000, 11);
  jp.evolve(mixed, 0.05 * z);
  const CoherentEstimate mcoh = estimate_coherent(mixed);
  CHECK(mcoh.mixed_start_warning);
}

TEST_CASE("scatter counts follow the uniform-rate Poisson law") {
  // hand-built table with node-independent Sigma: N ~ Poisson(sigma z)
  const TransportParams p = gauss_params(5.0);
  auto grid = std::make_shared<AngularGrid>(make_grid_1d(p, 16));
  auto table = std::make_shared<CrossSectionTable>();
  table->params = p;
  table->grid = grid;
  const double s = 1.3;
  const double wtot = grid->total_weight();
  table->q_matrix = Eigen::MatrixXd::Constant(16, 16, s / wtot);
  table->sigma = Eigen::VectorXd::Constant(16, s);
  table->mfp = Eigen::VectorXd::Constant(16, 2.0 / s);

  std::vector<double> law(16, 0.0);
  law[8] = 1.0;
  ParticleEnsemble ens = make_ensemble(grid, law, 100000, 5);
  const JumpProcess jp(table);
  const double z = 2.0;
  jp.evolve(ens, z);

  const double lambda = s * z;
  const EnsembleStats stats = ensemble_stats(ens);
  const double se = std::sqrt(lambda / static_cast<double>(ens.size()));
  CHECK(std::abs(stats.mean_n_scatter - lambda) < 4.0 * se);

  // one flight at rate sigma covers 1/sigma on average
  ParticleEnsemble once = make_ensemble(grid, law, 100000, 6);
  double mean_first = 0.0;
  std::size_t n_first = 0;
  for (auto& q : once.particles) {
    const double flight = q.rng.exponential(s);
    mean_first += flight;
    ++n_first;
  }
  mean_first /= static_cast<double>(n_first);
  CHECK(std::abs(mean_first - 1.0 / s) <
        4.0 / (s * std::sqrt(static_cast<double>(n_first))));
}

TEST_CASE("long runs relax to the weight-proportional stationary law") {
  auto table = make_table(2.0, 16);
  std::vector<double> law(16, 0.0);
  law[4] = 1.0;
  ParticleEnsemble ens = make_ensemble(table->grid, law, 50000, 31);
  const JumpProcess jp(table);
  jp.evolve(ens, 20.0 * table->max_mfp());

  std::vector<double> counts(16, 0.0);
  for (const auto& p : ens.particles) {
    counts[static_cast<std::size_t>(p.node)] += 1.0;
  }
  std::vector<double> probs(16);
  const double wtot = table->grid->total_weight();
  for (std::size_t i = 0; i < 16; ++i) {
    probs[i] = table->grid->weights[i] / wtot;
  }
  const Chi2Result r = pooled_chi2(counts, probs, 50000.0);
  CHECK(r.stat < chi2_quantile_999(r.dof));

  // the node histogram as an intensity estimate: near uniform in I
  const IntensityEstimate est = estimate_intensity(ens);
  CHECK(std::abs(est.intensity.total() - 1.0) < 1e-12);
  int within = 0;
  for (Eigen::Index i = 0; i < 16; ++i) {
    const double target = 1.0 / wtot;
    if (std::abs(est.intensity.values[i] - target) <=
        4.0 * est.std_error[i]) {
      ++within;
    }
    CHECK(est.std_error[i] > 0.0);
  }
  CHECK(within >= 15);
}

TEST_CASE("input validation") {
  auto table = make_table(5.0, 16);
  std::vector<double> law(16, 1.0);

  CHECK(code_of([&] { make_ensemble(nullptr, law, 10, 1); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([&] { make_ensemble(table->grid, law, 0, 1); }) ==
        ErrorCode::invalid_argument);
  std::vector<double> short_law(8, 1.0);
  CHECK(code_of([&] { make_ensemble(table->grid, short_law, 10, 1); }) ==
        ErrorCode::invalid_argument);
  std::vector<double> neg_law(16, 1.0);
  neg_law[3] = -0.1;
  CHECK(code_of([&] { make_ensemble(table->grid, neg_law, 10, 1); }) ==
        ErrorCode::invalid_argument);
  std::vector<double> zero_law(16, 0.0);
  CHECK(code_of([&] { make_ensemble(table->grid, zero_law, 10, 1); }) ==
        ErrorCode::invalid_argument);

  ParticleEnsemble ens = make_ensemble(table->grid, law, 100, 1);
  const JumpProcess jp(table);
  CHECK(code_of([&] { jp.evolve(ens, -1.0); }) == ErrorCode::invalid_argument);

  // dz = 0 is a no-op
  const auto before = ens.particles;
  jp.evolve(ens, 0.0);
  bool unchanged = true;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    unchanged = unchanged && ens.particles[i].node == before[i].node &&
                ens.particles[i].x == before[i].x;
  }
  CHECK(unchanged);

  ParticleEnsemble empty;
  empty.grid = table->grid;
  CHECK(code_of([&] { estimate_intensity(empty); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([&] { estimate_coherent(empty); }) ==
        ErrorCode::invalid_argument);
}

}  // TEST_SUITE
