#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace quac {

using Rng = std::mt19937_64;

/// Independent stream for task `index` under `root`. Streams depend only on
/// (root, index), so results do not depend on scheduling order.
inline Rng derive_stream(std::uint64_t root, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(root),
                    static_cast<std::uint32_t>(root >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x51ed2701u};
  return Rng(seq);
}

/// Uniform double in [0, 1). Implemented directly so draws do not depend on
/// the standard library's distribution internals.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

/// Standard normal draw (Box-Muller, one value per call).
inline double standard_normal(Rng& rng) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace quac
