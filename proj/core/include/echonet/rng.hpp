#pragma once

#include <cstdint>
#include <random>

namespace echonet {

// All randomness in the project flows through this engine. Distribution
// helpers below are hand-rolled so that a given seed produces the same
// stream on every platform (the standard <random> distributions are
// implementation-defined).
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic per-index seed derivation. Independent streams for
// replications/workers regardless of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x51ed2701a93c4d5bull));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Uniform double in [0, 1), 53 random bits.
inline double uniform_unit(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform double in [-1, 1).
inline double uniform_pm1(Rng& g) { return 2.0 * uniform_unit(g) - 1.0; }

// Unbiased integer in [0, n). Lemire multiply-shift with rejection.
inline std::uint32_t uniform_index(Rng& g, std::uint32_t n) {
  const std::uint64_t threshold = (0ull - n) % n;
  for (;;) {
    const std::uint64_t r = g();
    if (r >= threshold) {
      return static_cast<std::uint32_t>(
          (static_cast<unsigned __int128>(r) * n) >> 64);
    }
  }
}

inline bool bernoulli(Rng& g, double p) { return uniform_unit(g) < p; }

}  // namespace echonet
