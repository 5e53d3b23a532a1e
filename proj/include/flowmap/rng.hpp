#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace flowmap::rng {

// Counter-based generator: every sample index gets its own stream, so
// generation order (serial or parallel) never changes the output.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of entropy.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one value per call (the paired value is discarded to keep
  // per-coordinate draw counts fixed).
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
};

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0x12345678ULL + index * 0x9e3779b97f4a7c15ULL));
  return g.next();
}

// Stream for the index-th sample of a seeded run.
inline SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix(seed, index));
}

// Fisher-Yates with a dedicated stream.
inline void shuffle(std::vector<std::size_t>& idx, std::uint64_t seed,
                    std::uint64_t round) {
  SplitMix64 g = stream(seed, 0xffff0000ULL + round);
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(g.next() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace flowmap::rng
