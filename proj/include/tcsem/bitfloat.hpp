#pragma once

// Bit-level IEEE-754 kernel: field access, exact decode/encode, a shared
// round-and-pack core, and the handful of reference operations the tensor
// core model is built on (exact FP16 products, IEEE FP32 addition, FP32 to
// FP16 conversion, power-of-two scaling).

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <variant>

namespace tcsem {

enum class RoundingMode : std::uint8_t { rne, rtz, rtn, rtp };

inline constexpr RoundingMode kAllRoundingModes[] = {
    RoundingMode::rne, RoundingMode::rtz, RoundingMode::rtn, RoundingMode::rtp};

std::string_view to_string(RoundingMode rm);

template <int ExponentBits, int FractionBits, std::unsigned_integral Storage>
struct FloatFormat {
  using storage = Storage;
  static constexpr int exponent_bits = ExponentBits;
  static constexpr int fraction_bits = FractionBits;
  static constexpr int precision = FractionBits + 1;
  static constexpr int total_bits = 1 + ExponentBits + FractionBits;
  static constexpr std::int32_t bias = (1 << (ExponentBits - 1)) - 1;
  static constexpr std::int32_t emin = 1 - bias;
  static constexpr std::int32_t emax = bias;
  static constexpr unsigned max_biased_exponent = (1u << ExponentBits) - 1;
  static_assert(total_bits == std::numeric_limits<Storage>::digits);
};

using Binary16 = FloatFormat<5, 10, std::uint16_t>;
using Binary32 = FloatFormat<8, 23, std::uint32_t>;
using Binary64 = FloatFormat<11, 52, std::uint64_t>;

enum class FloatClass : std::uint8_t { zero, subnormal, normal, infinite, nan };

/// Raw IEEE bit pattern with field accessors. Equality is bitwise.
template <class Format>
struct FloatBits {
  using format = Format;
  using storage = typename Format::storage;

  storage bits = 0;

  static constexpr storage sign_mask = storage{1} << (Format::total_bits - 1);
  static constexpr storage fraction_mask = (storage{1} << Format::fraction_bits) - 1;

  constexpr FloatBits() = default;
  constexpr explicit FloatBits(storage b) : bits(b) {}

  constexpr bool sign() const { return (bits & sign_mask) != 0; }
  constexpr unsigned biased_exponent() const {
    return static_cast<unsigned>((bits >> Format::fraction_bits) & Format::max_biased_exponent);
  }
  constexpr storage fraction() const { return bits & fraction_mask; }

  constexpr FloatClass classify() const {
    const unsigned e = biased_exponent();
    if (e == Format::max_biased_exponent) return fraction() == 0 ? FloatClass::infinite : FloatClass::nan;
    if (e == 0) return fraction() == 0 ? FloatClass::zero : FloatClass::subnormal;
    return FloatClass::normal;
  }
  constexpr bool is_nan() const { return classify() == FloatClass::nan; }
  constexpr bool is_inf() const { return classify() == FloatClass::infinite; }
  constexpr bool is_zero() const { return classify() == FloatClass::zero; }
  constexpr bool is_finite() const { return biased_exponent() != Format::max_biased_exponent; }

  constexpr FloatBits negated() const { return FloatBits{static_cast<storage>(bits ^ sign_mask)}; }
  constexpr FloatBits abs() const { return FloatBits{static_cast<storage>(bits & ~sign_mask)}; }

  static constexpr FloatBits zero(bool negative = false) { return FloatBits{negative ? sign_mask : storage{0}}; }
  static constexpr FloatBits infinity(bool negative = false) {
    return FloatBits{static_cast<storage>((negative ? sign_mask : storage{0}) |
                                          (storage{Format::max_biased_exponent} << Format::fraction_bits))};
  }
  /// The single quiet NaN every arithmetic routine here produces.
  static constexpr FloatBits canonical_nan() {
    return FloatBits{static_cast<storage>(infinity().bits | (storage{1} << (Format::fraction_bits - 1)))};
  }
  static constexpr FloatBits max_finite(bool negative = false) {
    return FloatBits{static_cast<storage>(infinity(negative).bits - 1)};
  }

  friend constexpr bool operator==(FloatBits, FloatBits) = default;
};

using F16Bits = FloatBits<Binary16>;
using F32Bits = FloatBits<Binary32>;
using F64Bits = FloatBits<Binary64>;

/// An FP16 or FP32 operand, as accepted for the C/D matrices.
using MixedScalar = std::variant<F16Bits, F32Bits>;

/// Decoded value. For finite nonzero values: value = (-1)^negative * significand * 2^exponent,
/// with the significand in the format's canonical width (hidden bit included for normals).
/// For NaN the significand holds the payload.
struct Unpacked {
  bool negative = false;
  FloatClass cls = FloatClass::zero;
  std::int32_t exponent = 0;
  std::uint64_t significand = 0;

  friend bool operator==(const Unpacked&, const Unpacked&) = default;
};

template <class Format>
constexpr Unpacked decode(FloatBits<Format> x) {
  Unpacked u;
  u.negative = x.sign();
  u.cls = x.classify();
  switch (u.cls) {
    case FloatClass::zero:
    case FloatClass::infinite:
      break;
    case FloatClass::nan:
      u.significand = x.fraction();
      break;
    case FloatClass::subnormal:
      u.significand = x.fraction();
      u.exponent = Format::emin - Format::fraction_bits;
      break;
    case FloatClass::normal:
      u.significand = std::uint64_t{x.fraction()} | (std::uint64_t{1} << Format::fraction_bits);
      u.exponent = static_cast<std::int32_t>(x.biased_exponent()) - Format::bias - Format::fraction_bits;
      break;
  }
  return u;
}

/// Exponent of the leading significand bit for a finite nonzero value (emin for subnormals).
template <class Format>
constexpr std::int32_t alignment_exponent(FloatBits<Format> x) {
  const unsigned e = x.biased_exponent();
  return e == 0 ? Format::emin : static_cast<std::int32_t>(e) - Format::bias;
}

template <class Format>
struct RoundOutcome {
  FloatBits<Format> value;
  bool inexact = false;
  bool overflow = false;
  bool underflow = false;  // tiny and inexact
  bool halfway = false;    // discarded part was exactly one half ulp
};

/// Rounds (-1)^negative * significand * 2^exponent to the format. Every bit of
/// the significand is treated as exact; callers fold sticky information into
/// the low bit themselves.
template <class Format>
constexpr RoundOutcome<Format> round_pack(bool negative, std::uint64_t significand, std::int32_t exponent,
                                          RoundingMode rm) {
  using Bits = FloatBits<Format>;
  using S = typename Format::storage;
  constexpr int P = Format::precision;
  RoundOutcome<Format> out;
  if (significand == 0) {
    out.value = Bits::zero(negative);
    return out;
  }
  const int lead = std::bit_width(significand) - 1;
  const std::int64_t lead_exp = std::int64_t{exponent} + lead;
  std::int64_t lsb_exp = std::max<std::int64_t>(lead_exp - (P - 1), Format::emin - (P - 1));
  const std::int64_t shift = lsb_exp - exponent;

  std::uint64_t kept = 0;
  bool round_up = false;
  if (shift <= 0) {
    kept = significand << (-shift);
  } else {
    bool above_half = false;
    bool at_half = false;
    bool nonzero = true;
    if (shift > 64) {
      kept = 0;
    } else if (shift == 64) {
      kept = 0;
      const std::uint64_t half = std::uint64_t{1} << 63;
      above_half = significand > half;
      at_half = significand == half;
    } else {
      kept = significand >> shift;
      const std::uint64_t rem = significand & ((std::uint64_t{1} << shift) - 1);
      const std::uint64_t half = std::uint64_t{1} << (shift - 1);
      nonzero = rem != 0;
      above_half = rem > half;
      at_half = rem == half;
    }
    out.inexact = nonzero;
    out.halfway = at_half;
    switch (rm) {
      case RoundingMode::rne: round_up = above_half || (at_half && (kept & 1u)); break;
      case RoundingMode::rtz: round_up = false; break;
      case RoundingMode::rtp: round_up = !negative && nonzero; break;
      case RoundingMode::rtn: round_up = negative && nonzero; break;
    }
  }
  const bool tiny = kept < (std::uint64_t{1} << (P - 1));
  if (round_up) {
    ++kept;
    if (kept == (std::uint64_t{1} << P)) {
      kept >>= 1;
      ++lsb_exp;
    }
  }
  out.underflow = tiny && out.inexact;

  if (kept == 0) {
    out.value = Bits::zero(negative);
    return out;
  }
  if (kept < (std::uint64_t{1} << (P - 1))) {
    out.value = Bits{static_cast<S>((negative ? Bits::sign_mask : S{0}) | static_cast<S>(kept))};
    return out;
  }
  const std::int64_t result_exp = lsb_exp + (P - 1);
  if (result_exp > Format::emax) {
    out.overflow = true;
    out.inexact = true;
    const bool to_inf = rm == RoundingMode::rne || (rm == RoundingMode::rtp && !negative) ||
                        (rm == RoundingMode::rtn && negative);
    out.value = to_inf ? Bits::infinity(negative) : Bits::max_finite(negative);
    return out;
  }
  const S biased = static_cast<S>(result_exp + Format::bias);
  out.value = Bits{static_cast<S>((negative ? Bits::sign_mask : S{0}) |
                                  static_cast<S>(biased << Format::fraction_bits) |
                                  (static_cast<S>(kept) & Bits::fraction_mask))};
  return out;
}

/// Inverse of decode. Throws std::domain_error when the value is not exactly
/// representable in the format.
template <class Format>
constexpr FloatBits<Format> encode(const Unpacked& u) {
  using Bits = FloatBits<Format>;
  using S = typename Format::storage;
  switch (u.cls) {
    case FloatClass::zero:
      return Bits::zero(u.negative);
    case FloatClass::infinite:
      return Bits::infinity(u.negative);
    case FloatClass::nan: {
      const S payload = static_cast<S>(u.significand) & Bits::fraction_mask;
      if (payload == 0) throw std::domain_error("encode: NaN needs a nonzero payload");
      return Bits{static_cast<S>(Bits::infinity(u.negative).bits | payload)};
    }
    case FloatClass::subnormal:
    case FloatClass::normal:
      break;
  }
  const auto r = round_pack<Format>(u.negative, u.significand, u.exponent, RoundingMode::rne);
  if (r.inexact) throw std::domain_error("encode: value not representable in target format");
  return r.value;
}

template <class To, class From>
constexpr FloatBits<To> convert_exact(FloatBits<From> x) {
  if (x.is_nan()) return FloatBits<To>::canonical_nan();
  return encode<To>(decode(x));
}

F32Bits f16_to_f32_exact(F16Bits a);
F16Bits f32_to_f16(F32Bits x, RoundingMode rm);
F32Bits mul_f16_exact(F16Bits a, F16Bits b);
F32Bits add_f32_ieee(F32Bits x, F32Bits y, RoundingMode rm);

struct ScaleResult {
  F32Bits value;
  bool inexact = false;
  bool overflow = false;
};
ScaleResult scale_pow2(F32Bits x, std::int32_t k);

/// Widens either operand kind to FP32 (exact).
F32Bits widen(const MixedScalar& s);

/// True when the FP32 value survives a round trip through FP16 unchanged.
bool representable_in_f16(F32Bits x);

/// Host conversions, for display and for tests; exact in both directions.
inline float to_float(F32Bits x) { return std::bit_cast<float>(x.bits); }
inline F32Bits from_float(float f) { return F32Bits{std::bit_cast<std::uint32_t>(f)}; }
inline double to_double(F64Bits x) { return std::bit_cast<double>(x.bits); }
inline F64Bits from_double(double d) { return F64Bits{std::bit_cast<std::uint64_t>(d)}; }

}  // namespace tcsem
