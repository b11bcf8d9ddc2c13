#ifndef OWRTE_RNG_HPP
#define OWRTE_RNG_HPP

#include <cmath>
#include <cstdint>

namespace owrte {

// SplitMix64: tiny splittable generator.  Each Monte Carlo particle owns an
// independent stream derived from (seed, particle index), which makes runs
// bit-reproducible no matter how the particle loop is scheduled.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t s = 0) : state(s) {}

  static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t stream) {
    // Scramble the stream index through the output mixer and use the result
    // as the stream's starting state.  Seeding states on an arithmetic
    // progression (seed + c*stream) would make neighbouring streams shifted
    // copies of one global sequence, so the hash round is essential.
    SplitMix64 g(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
    return SplitMix64(g.next());
  }

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1], safe as a -log argument.
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }
};

}  // namespace owrte

#endif
