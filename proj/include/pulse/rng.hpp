#pragma once

// Seeded random number generation with explicit transforms, so that the
// same seed produces the same stream on every platform and toolchain.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace pulse {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in (0, 1].
  double uniform01() {
    const std::uint64_t r = gen_() >> 11;  // 53 bits
    return (static_cast<double>(r) + 1.0) * 0x1p-53;
  }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return r % n;
  }

  // Standard normal via Box-Muller (uncached, two uniforms per draw).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace pulse
