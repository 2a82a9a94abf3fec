/**
 * @file random.hpp
 * @brief Seeded random streams with platform-independent output.
 *
 * std::mt19937_64 has a fully specified output sequence, but the standard
 * distributions do not. Uniform and normal variates are therefore derived
 * here so that a given seed yields the same numbers on every toolchain.
 */
#pragma once

#include <cstdint>
#include <random>

namespace nftrack {

/// SplitMix64 finalizer. Bijective 64-bit mix used for all seed derivation.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` under `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Independent child stream; advances this stream by one draw.
  Rng split() { return Rng(mix64(engine_())); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace nftrack
