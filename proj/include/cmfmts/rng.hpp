#pragma once

#include <cmath>
#include <cstdint>

namespace cmfmts {

/// SplitMix64 generator. Chosen over std::mt19937 + distributions because
/// every draw is defined here, so streams are identical across platforms and
/// standard-library versions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t bounded(std::uint64_t n) {
    // multiply-shift; the modulo bias is < 2^-64 per draw, irrelevant here,
    // and the mapping is fixed by this code rather than by the library.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller (no spare caching, two draws per call).
  double gaussian() {
    double u1 = 1.0 - uniform01(); // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Derives an independent stream for work item `index` (e.g. one tree of a
  /// forest) so parallel schedules cannot change results.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed ^ (0x5851F42D4C957F2DULL * (index + 1)));
    return r.next_u64();
  }

private:
  std::uint64_t state_;
};

} // namespace cmfmts
