#pragma once

#include <cstdint>
#include <random>

namespace srprompt {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer: a bijective 64-bit avalanche mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-record seed: mix64(mix64(global_seed) ^ mix64(index ^ 0xD1B54A32D192ED03)).
/// Depends only on the pair, so any worker can own any index.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t record_index) noexcept {
  return mix64(mix64(global_seed) ^ mix64(record_index ^ 0xD1B54A32D192ED03ULL));
}

inline Rng derive_record_rng(std::uint64_t global_seed, std::uint64_t record_index) {
  return Rng(derive_seed(global_seed, record_index));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace srprompt
