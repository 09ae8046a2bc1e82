#pragma once

#include <cstdint>
#include <random>

namespace nbflab {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream index
/// (splitmix64 finalizer). Used so parallel tasks get reproducible, decorrelated
/// generators regardless of scheduling.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) with 53 bits, independent of the standard library's
/// distribution implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  // Modulo bias is negligible for n << 2^64 and keeps the draw sequence simple.
  return static_cast<std::size_t>(rng() % n);
}

}  // namespace nbflab
