#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rua {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer. Avalanche-quality 64-bit mix; this exact function is
/// part of the reproducibility contract and must not change between releases.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Seed for the sub-stream `index` of a root seed:
/// mix64(seed + (index + 1) * golden gamma). Distinct indices give
/// independent streams; index 0 does not collide with the root seed itself.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + (index + 1) * kGoldenGamma);
}

/// Deterministic random stream. All draws are defined on top of the
/// standard-specified mt19937_64 sequence, so identical seeds yield identical
/// draws on every platform. Not thread-safe; use one stream per worker.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Uniform integer in [0, n) without modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool next_coin() { return next_unit() < 0.5; }

  /// Standard normal via Box-Muller; consumes exactly two uniform draws.
  double next_gaussian() {
    const double u1 = 1.0 - next_unit();  // (0, 1]
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rua
