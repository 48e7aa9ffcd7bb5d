#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace tiersim {

// Per-run random stream. Bounded and real draws are derived from raw
// mt19937_64 output by hand so that sequences do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, n), unbiased (rejection on the top zone).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  // Uniform real in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double mean) { return -mean * std::log1p(-unit()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tiersim
