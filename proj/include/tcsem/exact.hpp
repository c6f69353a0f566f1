#pragma once

// Exact dyadic rationals: sign * mantissa * 2^exponent with an unbounded
// mantissa. This is the ground truth every rounding routine is checked against.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "tcsem/bitfloat.hpp"

namespace tcsem {

class ExactDyadic {
 public:
  using Integer = boost::multiprecision::cpp_int;
  enum class Kind : std::uint8_t { finite, infinite, nan };

  ExactDyadic() = default;  // +0

  /// Finite value; the result is brought into canonical form (odd or zero mantissa).
  static ExactDyadic finite(bool negative, Integer mantissa, std::int64_t exponent);
  static ExactDyadic from_int(std::int64_t v);
  static ExactDyadic pow2(std::int64_t exponent, bool negative = false);
  static ExactDyadic infinity(bool negative);
  static ExactDyadic nan();

  Kind kind() const { return kind_; }
  bool negative() const { return negative_; }
  const Integer& mantissa() const { return mantissa_; }
  std::int64_t exponent() const { return exponent_; }

  bool is_finite() const { return kind_ == Kind::finite; }
  bool is_nan() const { return kind_ == Kind::nan; }
  bool is_zero() const { return kind_ == Kind::finite && mantissa_ == 0; }

  ExactDyadic operator-() const;
  ExactDyadic abs() const;

  friend ExactDyadic operator+(const ExactDyadic& a, const ExactDyadic& b);
  friend ExactDyadic operator-(const ExactDyadic& a, const ExactDyadic& b) { return a + (-b); }
  friend ExactDyadic operator*(const ExactDyadic& a, const ExactDyadic& b);

  /// Numeric comparison: +0 == -0, NaN is unordered with everything.
  friend std::partial_ordering operator<=>(const ExactDyadic& a, const ExactDyadic& b);
  friend bool operator==(const ExactDyadic& a, const ExactDyadic& b) {
    return (a <=> b) == std::partial_ordering::equivalent;
  }

  /// Renders as `+M·2^e` with the canonical odd mantissa, or `+0`, `-inf`, `nan`.
  std::string to_string() const;
  double to_double() const;

 private:
  Kind kind_ = Kind::finite;
  bool negative_ = false;
  Integer mantissa_ = 0;
  std::int64_t exponent_ = 0;
};

inline ExactDyadic exact_add(const ExactDyadic& a, const ExactDyadic& b) { return a + b; }
inline ExactDyadic exact_mul(const ExactDyadic& a, const ExactDyadic& b) { return a * b; }
inline std::partial_ordering exact_compare(const ExactDyadic& a, const ExactDyadic& b) { return a <=> b; }

template <class Format>
ExactDyadic to_exact(FloatBits<Format> x) {
  const Unpacked u = decode(x);
  switch (u.cls) {
    case FloatClass::nan: return ExactDyadic::nan();
    case FloatClass::infinite: return ExactDyadic::infinity(u.negative);
    default: return ExactDyadic::finite(u.negative, ExactDyadic::Integer(u.significand), u.exponent);
  }
}

inline ExactDyadic to_exact(const MixedScalar& s) {
  return std::visit([](auto v) { return to_exact(v); }, s);
}

/// Correctly rounds an exact value into a format. Written independently of
/// round_pack so the two can check each other. Zero keeps the sign it carries.
template <class Format>
FloatBits<Format> round_exact(const ExactDyadic& v, RoundingMode rm) {
  using Bits = FloatBits<Format>;
  using S = typename Format::storage;
  using Integer = ExactDyadic::Integer;
  constexpr int P = Format::precision;
  if (v.is_nan()) return Bits::canonical_nan();
  if (v.kind() == ExactDyadic::Kind::infinite) return Bits::infinity(v.negative());
  if (v.is_zero()) return Bits::zero(v.negative());

  const bool neg = v.negative();
  const Integer& m = v.mantissa();
  const std::int64_t top = static_cast<std::int64_t>(boost::multiprecision::msb(m));
  const std::int64_t lead_exp = v.exponent() + top;
  std::int64_t lsb = std::max<std::int64_t>(lead_exp - (P - 1), std::int64_t{Format::emin} - (P - 1));

  Integer q;
  int direction = 0;  // sign of (remainder - half)
  bool inexact = false;
  if (v.exponent() >= lsb) {
    q = m << static_cast<unsigned>(v.exponent() - lsb);
  } else {
    const auto sh = static_cast<unsigned>(lsb - v.exponent());
    q = m >> sh;
    const Integer rem = m - (q << sh);
    inexact = rem != 0;
    const Integer half = Integer(1) << (sh - 1);
    direction = rem < half ? -1 : (rem == half ? 0 : 1);
  }
  bool up = false;
  if (inexact) {
    switch (rm) {
      case RoundingMode::rne: up = direction > 0 || (direction == 0 && (q & 1) != 0); break;
      case RoundingMode::rtz: up = false; break;
      case RoundingMode::rtp: up = !neg; break;
      case RoundingMode::rtn: up = neg; break;
    }
  }
  if (up) q += 1;
  if (q == (Integer(1) << P)) {
    q >>= 1;
    ++lsb;
  }
  if (q == 0) return Bits::zero(neg);
  const auto kept = q.template convert_to<std::uint64_t>();
  const S sign = neg ? Bits::sign_mask : S{0};
  if (kept < (std::uint64_t{1} << (P - 1))) return Bits{static_cast<S>(sign | kept)};
  const std::int64_t e = lsb + P - 1;
  if (e > Format::emax) {
    const bool to_inf = rm == RoundingMode::rne || (rm == RoundingMode::rtp && !neg) ||
                        (rm == RoundingMode::rtn && neg);
    return to_inf ? Bits::infinity(neg) : Bits::max_finite(neg);
  }
  return Bits{static_cast<S>(sign | (static_cast<S>(e + Format::bias) << Format::fraction_bits) |
                             (static_cast<S>(kept) & Bits::fraction_mask))};
}

/// The value if it is exactly representable in the format, otherwise nothing.
template <class Format>
std::optional<FloatBits<Format>> exactly_representable(const ExactDyadic& v) {
  if (!v.is_finite()) return std::nullopt;
  const auto r = round_exact<Format>(v, RoundingMode::rtz);
  if (!r.is_finite() || to_exact(r) != v) return std::nullopt;
  return r;
}

}  // namespace tcsem
