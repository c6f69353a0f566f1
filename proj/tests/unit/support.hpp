#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tcsem/bitfloat.hpp"

namespace tcsem::testing {

// Values spread across the whole exponent range, with extra weight on
// subnormals, near-ties and operands of close magnitude.
class ValueSource {
 public:
  explicit ValueSource(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t raw() { return rng_(); }
  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

  F16Bits f16_finite() {
    while (true) {
      const F16Bits x{static_cast<std::uint16_t>(rng_())};
      if (x.is_finite()) return x;
    }
  }

  F32Bits f32_finite() {
    switch (pick(4)) {
      case 0: {
        const auto frac = static_cast<std::uint32_t>(rng_()) & F32Bits::fraction_mask;
        const auto sign = static_cast<std::uint32_t>(rng_() & 1) << 31;
        return F32Bits{sign | frac};  // subnormal or zero
      }
      case 1: {
        // few significant bits: exercises exact cancellation and ties
        const auto sign = static_cast<std::uint32_t>(rng_() & 1) << 31;
        const auto exp = static_cast<std::uint32_t>(1 + pick(254)) << 23;
        const auto frac = (static_cast<std::uint32_t>(rng_()) & 0x7u) << pick(21);
        return F32Bits{sign | exp | frac};
      }
      default:
        while (true) {
          const F32Bits x{static_cast<std::uint32_t>(rng_())};
          if (x.is_finite()) return x;
        }
    }
  }

  // Second operand near the first in exponent so additions overlap.
  F32Bits f32_near(F32Bits x) {
    const int e = static_cast<int>(x.biased_exponent()) + pick(60) - 30;
    if (e < 0 || e > 254) return f32_finite();
    const auto sign = static_cast<std::uint32_t>(rng_() & 1) << 31;
    const auto frac = static_cast<std::uint32_t>(rng_()) & F32Bits::fraction_mask;
    return F32Bits{sign | (static_cast<std::uint32_t>(e) << 23) | frac};
  }

  // FP16 value with an unbiased exponent in [lo, hi] (normals only).
  F16Bits f16_in_range(int lo, int hi) {
    const int e = lo + pick(hi - lo + 1);
    const auto sign = static_cast<std::uint16_t>((rng_() & 1) << 15);
    const auto frac = static_cast<std::uint16_t>(rng_() & 0x3FF);
    return F16Bits{static_cast<std::uint16_t>(sign | ((e + 15) << 10) | frac)};
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace tcsem::testing
