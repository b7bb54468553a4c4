#pragma once

#include <cstdint>
#include <random>

namespace maxent {

/// The random source threaded through every stochastic routine.
using Rng = std::mt19937_64;

/// Uniform draw on [0,1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// SplitMix64 finalizer. Bijective on 64-bit words with full avalanche.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace maxent
