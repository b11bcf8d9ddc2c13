#ifndef OWRTE_MONTECARLO_HPP
#define OWRTE_MONTECARLO_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "owrte/rng.hpp"
#include "owrte/transport.hpp"

namespace owrte {

// Jump-process particle: discrete direction node, transverse position, and a
// private RNG stream so results do not depend on scheduling.
struct Particle {
  std::int32_t node = 0;
  std::uint32_t n_scatter = 0;
  Vec x = Vec::Zero();
  SplitMix64 rng{0};
};

struct ParticleEnsemble {
  std::shared_ptr<const AngularGrid> grid;
  std::vector<Particle> particles;
  double z = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return particles.size(); }
};

// Walker alias tables for every kernel row, plus per-node rates: everything
// needed to run the jump chain sampled exactly from w_j Q_ij / Sigma_i.
class JumpProcess {
 public:
  explicit JumpProcess(std::shared_ptr<const CrossSectionTable> table);

  const CrossSectionTable& table() const { return *table_; }

  // Next direction node after a scattering event in row `node`.
  std::int32_t sample_scatter(std::int32_t node, SplitMix64& rng) const;

  // Exact row probabilities (for statistical validation).
  const std::vector<double>& row_probabilities(std::int32_t node) const;

  // Advance every particle by dz: exponential free flights at the node's
  // Sigma interleaved with alias-sampled direction jumps; positions drift
  // with dx/dz = kappa / beta.
  void evolve(ParticleEnsemble& ensemble, double dz) const;

 private:
  struct AliasRow {
    std::vector<double> prob;
    std::vector<std::int32_t> alias;
    std::vector<double> pmf;
  };

  std::shared_ptr<const CrossSectionTable> table_;
  std::vector<AliasRow> rows_;
  std::vector<Vec> velocity_;
};

// Draw n_particles start nodes from `initial_law` (probability per node,
// normalized internally) and give each particle its own RNG stream.
ParticleEnsemble make_ensemble(std::shared_ptr<const AngularGrid> grid,
                               const std::vector<double>& initial_law,
                               std::size_t n_particles, std::uint64_t seed);

// Node histogram converted to an intensity estimate: I_i = p_i / w_i with
// binomial standard errors (probability floored at 1/N so empty bins keep a
// usable scale).
struct IntensityEstimate {
  IntensityField intensity;
  Eigen::VectorXd std_error;
};
IntensityEstimate estimate_intensity(const ParticleEnsemble& ensemble);

// Fraction of never-scattered particles with its binomial standard error.
struct CoherentEstimate {
  double fraction = 0.0;
  double std_error = 0.0;
  // Set when the unscattered particles occupy more than one node, i.e. the
  // ensemble was not launched monoenergetically and e^{-Sigma z} has no
  // single rate to compare against.
  bool mixed_start_warning = false;
};
CoherentEstimate estimate_coherent(const ParticleEnsemble& ensemble);

// Summary statistics used by the CLI outputs.
struct EnsembleStats {
  double mean_n_scatter = 0.0;
  double kappa_variance = 0.0;   // variance of kappa components around mean
  double x_variance = 0.0;       // variance of x components around mean
};
EnsembleStats ensemble_stats(const ParticleEnsemble& ensemble);

}  // namespace owrte

#endif
