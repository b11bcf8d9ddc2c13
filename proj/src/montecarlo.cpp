#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "omp_guard.hpp"
#include "owrte/common.hpp"
#include "owrte/montecarlo.hpp"

namespace owrte {

namespace {

// Vose alias construction for one pmf row; O(n) setup, O(1) sampling.
void build_alias(const std::vector<double>& pmf, std::vector<double>& prob,
                 std::vector<std::int32_t>& alias) {
  const std::size_t n = pmf.size();
  prob.assign(n, 1.0);
  alias.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::int32_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = pmf[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::int32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::int32_t s = small.back();
    const std::int32_t l = large.back();
    small.pop_back();
    large.pop_back();
    prob[static_cast<std::size_t>(s)] = scaled[static_cast<std::size_t>(s)];
    alias[static_cast<std::size_t>(s)] = l;
    scaled[static_cast<std::size_t>(l)] =
        scaled[static_cast<std::size_t>(l)] +
        scaled[static_cast<std::size_t>(s)] - 1.0;
    (scaled[static_cast<std::size_t>(l)] < 1.0 ? small : large).push_back(l);
  }
  // leftovers are 1 up to rounding
}

}  // namespace

JumpProcess::JumpProcess(std::shared_ptr<const CrossSectionTable> table)
    : table_(std::move(table)) {
  require(static_cast<bool>(table_), ErrorCode::invalid_argument,
          "JumpProcess needs a cross-section table");
  const auto& grid = *table_->grid;
  const auto n = static_cast<std::size_t>(table_->q_matrix.rows());
  require(n == grid.size() && n > 0, ErrorCode::invalid_argument,
          "cross-section table is inconsistent");

  rows_.resize(n);
  velocity_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = grid.beta_at(i);
    velocity_[i] = grid.nodes[i] / b;

    auto& row = rows_[i];
    row.pmf.resize(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p =
          grid.weights[j] *
          table_->q_matrix(static_cast<Eigen::Index>(i),
                           static_cast<Eigen::Index>(j));
      require(p >= 0.0 && std::isfinite(p), ErrorCode::domain,
              "kernel row has a negative or non-finite entry");
      row.pmf[j] = p;
      total += p;
    }
    require(total > 0.0, ErrorCode::domain, "kernel row has zero mass");
    for (double& p : row.pmf) p /= total;
    build_alias(row.pmf, row.prob, row.alias);
  }
}

std::int32_t JumpProcess::sample_scatter(std::int32_t node,
                                         SplitMix64& rng) const {
  require(node >= 0 && static_cast<std::size_t>(node) < rows_.size(),
          ErrorCode::range, "node index out of range");
  const auto& row = rows_[static_cast<std::size_t>(node)];
  const auto n = static_cast<double>(row.prob.size());
  auto slot = static_cast<std::size_t>(rng.uniform() * n);
  if (slot >= row.prob.size()) slot = row.prob.size() - 1;
  return rng.uniform() < row.prob[slot]
             ? static_cast<std::int32_t>(slot)
             : row.alias[slot];
}

const std::vector<double>& JumpProcess::row_probabilities(
    std::int32_t node) const {
  require(node >= 0 && static_cast<std::size_t>(node) < rows_.size(),
          ErrorCode::range, "node index out of range");
  return rows_[static_cast<std::size_t>(node)].pmf;
}

void JumpProcess::evolve(ParticleEnsemble& ensemble, double dz) const {
  require(static_cast<bool>(ensemble.grid), ErrorCode::invalid_argument,
          "ensemble has no grid");
  require(ensemble.grid->size() == rows_.size(), ErrorCode::invalid_argument,
          "ensemble grid does not match the jump process");
  require(std::isfinite(dz) && dz >= 0.0, ErrorCode::invalid_argument,
          "dz must be finite and nonnegative");
  if (dz == 0.0 || ensemble.particles.empty()) {
    ensemble.z += dz;
    return;
  }

  const auto count = static_cast<std::int64_t>(ensemble.particles.size());
  OmpGuard guard;
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < count; ++p) {
    guard.run([&, p] {
      Particle& part = ensemble.particles[static_cast<std::size_t>(p)];
      double remaining = dz;
      while (true) {
        const double rate =
            table_->sigma[static_cast<Eigen::Index>(part.node)];
        const double flight = part.rng.exponential(rate);
        if (flight >= remaining) {
          part.x += velocity_[static_cast<std::size_t>(part.node)] * remaining;
          break;
        }
        part.x += velocity_[static_cast<std::size_t>(part.node)] * flight;
        remaining -= flight;
        part.node = sample_scatter(part.node, part.rng);
        ++part.n_scatter;
      }
    });
  }
  guard.rethrow();
  ensemble.z += dz;
}

ParticleEnsemble make_ensemble(std::shared_ptr<const AngularGrid> grid,
                               const std::vector<double>& initial_law,
                               std::size_t n_particles, std::uint64_t seed) {
  require(static_cast<bool>(grid), ErrorCode::invalid_argument,
          "make_ensemble needs a grid");
  require(initial_law.size() == grid->size(), ErrorCode::invalid_argument,
          "initial_law must have one entry per grid node");
  require(n_particles > 0, ErrorCode::invalid_argument,
          "n_particles must be positive");

  std::vector<double> cdf(initial_law.size());
  double total = 0.0;
  for (std::size_t i = 0; i < initial_law.size(); ++i) {
    require(initial_law[i] >= 0.0 && std::isfinite(initial_law[i]),
            ErrorCode::invalid_argument,
            "initial_law entries must be nonnegative and finite");
    total += initial_law[i];
    cdf[i] = total;
  }
  require(total > 0.0, ErrorCode::invalid_argument,
          "initial_law must have positive mass");
  for (double& c : cdf) c /= total;
  cdf.back() = 1.0;

  ParticleEnsemble ensemble;
  ensemble.grid = std::move(grid);
  ensemble.seed = seed;
  ensemble.z = 0.0;
  ensemble.particles.resize(n_particles);

  const auto count = static_cast<std::int64_t>(n_particles);
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < count; ++p) {
    // nothing in here throws: plain arithmetic on preallocated storage
    Particle& part = ensemble.particles[static_cast<std::size_t>(p)];
    part.rng = SplitMix64::for_stream(seed, static_cast<std::uint64_t>(p));
    const double u = part.rng.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    part.node = static_cast<std::int32_t>(
        std::min<std::ptrdiff_t>(it - cdf.begin(),
                                 static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    part.n_scatter = 0;
    part.x = Vec::Zero();
  }
  return ensemble;
}

IntensityEstimate estimate_intensity(const ParticleEnsemble& ensemble) {
  require(static_cast<bool>(ensemble.grid), ErrorCode::invalid_argument,
          "ensemble has no grid");
  require(!ensemble.particles.empty(), ErrorCode::invalid_argument,
          "ensemble is empty");
  const auto n = static_cast<Eigen::Index>(ensemble.grid->size());
  const double big_n = static_cast<double>(ensemble.particles.size());

  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n);
  for (const Particle& p : ensemble.particles) {
    require(p.node >= 0 && p.node < n, ErrorCode::range,
            "particle node out of range");
    counts[p.node] += 1.0;
  }

  IntensityEstimate est;
  est.intensity.grid = ensemble.grid;
  est.intensity.z = ensemble.z;
  est.intensity.values.resize(n);
  est.std_error.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = ensemble.grid->weights[static_cast<std::size_t>(i)];
    const double phat = counts[i] / big_n;
    const double pfloor = std::max(phat, 1.0 / big_n);
    est.intensity.values[i] = phat / w;
    est.std_error[i] = std::sqrt(pfloor * (1.0 - pfloor) / big_n) / w;
  }
  return est;
}

CoherentEstimate estimate_coherent(const ParticleEnsemble& ensemble) {
  require(!ensemble.particles.empty(), ErrorCode::invalid_argument,
          "ensemble is empty");
  const double big_n = static_cast<double>(ensemble.particles.size());
  double unscattered = 0.0;
  std::int32_t first_node = -1;
  bool mixed = false;
  for (const Particle& p : ensemble.particles) {
    if (p.n_scatter == 0) {
      unscattered += 1.0;
      // Unscattered particles still sit at their launch node, so a spread
      // here means the start was not monoenergetic.
      if (first_node < 0) {
        first_node = p.node;
      } else if (p.node != first_node) {
        mixed = true;
      }
    }
  }
  CoherentEstimate est;
  est.mixed_start_warning = mixed;
  est.fraction = unscattered / big_n;
  // Plain binomial error: zero when every particle (or none) survived, which
  // is the exact answer for a degenerate sample, not a reason to floor it.
  est.std_error = std::sqrt(est.fraction * (1.0 - est.fraction) / big_n);
  return est;
}

EnsembleStats ensemble_stats(const ParticleEnsemble& ensemble) {
  require(static_cast<bool>(ensemble.grid), ErrorCode::invalid_argument,
          "ensemble has no grid");
  require(!ensemble.particles.empty(), ErrorCode::invalid_argument,
          "ensemble is empty");
  const double big_n = static_cast<double>(ensemble.particles.size());
  const auto n = static_cast<std::int32_t>(ensemble.grid->size());

  // Accumulate about the first particle as pivot: a degenerate ensemble then
  // yields exactly zero variance instead of the roundoff of sum/N.
  require(ensemble.particles[0].node >= 0 && ensemble.particles[0].node < n,
          ErrorCode::range, "particle node out of range");
  const Vec kappa0 =
      ensemble.grid->nodes[static_cast<std::size_t>(ensemble.particles[0].node)];
  const Vec x0 = ensemble.particles[0].x;
  Vec kappa_mean = Vec::Zero();
  Vec x_mean = Vec::Zero();
  double scatter_mean = 0.0;
  for (const Particle& p : ensemble.particles) {
    require(p.node >= 0 && p.node < n, ErrorCode::range,
            "particle node out of range");
    kappa_mean +=
        ensemble.grid->nodes[static_cast<std::size_t>(p.node)] - kappa0;
    x_mean += p.x - x0;
    scatter_mean += static_cast<double>(p.n_scatter);
  }
  kappa_mean /= big_n;
  x_mean /= big_n;
  scatter_mean /= big_n;

  double kappa_var = 0.0;
  double x_var = 0.0;
  for (const Particle& p : ensemble.particles) {
    kappa_var += (ensemble.grid->nodes[static_cast<std::size_t>(p.node)] -
                  kappa0 - kappa_mean)
                     .squaredNorm();
    x_var += (p.x - x0 - x_mean).squaredNorm();
  }

  EnsembleStats stats;
  stats.mean_n_scatter = scatter_mean;
  stats.kappa_variance = kappa_var / big_n;
  stats.x_variance = x_var / big_n;
  return stats;
}

}  // namespace owrte
