#pragma once

// std::mt19937_64 output is fixed by the standard, but the standard
// distributions are not, so bounded draws are done here to keep generated
// corpora and splits identical across standard libraries.

#include <cstdint>
#include <limits>
#include <random>

namespace regiolex {

using Rng = std::mt19937_64;

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t excess = (kMax % n + 1) % n;
  std::uint64_t x = rng();
  while (excess != 0 && x > kMax - excess) x = rng();
  return x % n;
}

/// Uniform integer in [lo, hi].
inline std::uint64_t uniform_between(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + uniform_index(rng, hi - lo + 1);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace regiolex
