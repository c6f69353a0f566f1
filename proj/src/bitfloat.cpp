#include "tcsem/bitfloat.hpp"

namespace tcsem {

std::string_view to_string(RoundingMode rm) {
  switch (rm) {
    case RoundingMode::rne: return "rne";
    case RoundingMode::rtz: return "rtz";
    case RoundingMode::rtn: return "rtn";
    case RoundingMode::rtp: return "rtp";
  }
  return "?";
}

F32Bits f16_to_f32_exact(F16Bits a) { return convert_exact<Binary32>(a); }

F16Bits f32_to_f16(F32Bits x, RoundingMode rm) {
  const Unpacked u = decode(x);
  switch (u.cls) {
    case FloatClass::nan: return F16Bits::canonical_nan();
    case FloatClass::infinite: return F16Bits::infinity(u.negative);
    case FloatClass::zero: return F16Bits::zero(u.negative);
    default: break;
  }
  return round_pack<Binary16>(u.negative, u.significand, u.exponent, rm).value;
}

F32Bits mul_f16_exact(F16Bits a, F16Bits b) {
  const Unpacked ua = decode(a);
  const Unpacked ub = decode(b);
  const bool negative = ua.negative != ub.negative;
  if (ua.cls == FloatClass::nan || ub.cls == FloatClass::nan) return F32Bits::canonical_nan();
  const bool a_inf = ua.cls == FloatClass::infinite;
  const bool b_inf = ub.cls == FloatClass::infinite;
  if (a_inf || b_inf) {
    if (ua.cls == FloatClass::zero || ub.cls == FloatClass::zero) return F32Bits::canonical_nan();
    return F32Bits::infinity(negative);
  }
  if (ua.cls == FloatClass::zero || ub.cls == FloatClass::zero) return F32Bits::zero(negative);
  // 11x11-bit significands fit in 22 bits; exponents stay inside the FP32 normal range.
  const auto r = round_pack<Binary32>(negative, ua.significand * ub.significand, ua.exponent + ub.exponent,
                                      RoundingMode::rne);
  return r.value;
}

F32Bits add_f32_ieee(F32Bits x, F32Bits y, RoundingMode rm) {
  const Unpacked ux = decode(x);
  const Unpacked uy = decode(y);
  if (ux.cls == FloatClass::nan || uy.cls == FloatClass::nan) return F32Bits::canonical_nan();
  const bool x_inf = ux.cls == FloatClass::infinite;
  const bool y_inf = uy.cls == FloatClass::infinite;
  if (x_inf && y_inf) return ux.negative == uy.negative ? x : F32Bits::canonical_nan();
  if (x_inf) return x;
  if (y_inf) return y;
  const bool x_zero = ux.cls == FloatClass::zero;
  const bool y_zero = uy.cls == FloatClass::zero;
  if (x_zero && y_zero) {
    const bool negative = rm == RoundingMode::rtn ? (ux.negative || uy.negative) : (ux.negative && uy.negative);
    return F32Bits::zero(negative);
  }
  if (x_zero) return y;
  if (y_zero) return x;

  // Order so that `big` has the larger (or equal) LSB exponent.
  const Unpacked* big = &ux;
  const Unpacked* small = &uy;
  if (uy.exponent > ux.exponent) std::swap(big, small);
  const std::int32_t diff = big->exponent - small->exponent;

  std::uint64_t big_sig = 0;
  std::uint64_t small_sig = 0;
  std::int32_t exponent = 0;
  if (diff <= 32) {
    // Exact: 24 + 32 bits still leaves headroom for the carry.
    big_sig = big->significand << diff;
    small_sig = small->significand;
    exponent = small->exponent;
  } else {
    // `small` lies entirely below the rounding position of the result; keep
    // its top bits and jam the rest into bit 0 as a sticky bit.
    big_sig = big->significand << 32;
    const std::int32_t drop = diff - 32;
    if (drop >= 64) {
      small_sig = 1;
    } else {
      small_sig = small->significand >> drop;
      if ((small->significand & ((std::uint64_t{1} << drop) - 1)) != 0) small_sig |= 1;
    }
    exponent = big->exponent - 32;
  }

  if (big->negative == small->negative) {
    return round_pack<Binary32>(big->negative, big_sig + small_sig, exponent, rm).value;
  }
  if (big_sig == small_sig) return F32Bits::zero(rm == RoundingMode::rtn);
  if (big_sig > small_sig) return round_pack<Binary32>(big->negative, big_sig - small_sig, exponent, rm).value;
  return round_pack<Binary32>(small->negative, small_sig - big_sig, exponent, rm).value;
}

ScaleResult scale_pow2(F32Bits x, std::int32_t k) {
  const Unpacked u = decode(x);
  switch (u.cls) {
    case FloatClass::nan: return {F32Bits::canonical_nan()};
    case FloatClass::infinite:
    case FloatClass::zero: return {x};
    default: break;
  }
  const auto r = round_pack<Binary32>(u.negative, u.significand, u.exponent + k, RoundingMode::rne);
  return {r.value, r.inexact, r.overflow};
}

F32Bits widen(const MixedScalar& s) {
  return std::visit(
      [](auto v) -> F32Bits {
        if constexpr (std::is_same_v<decltype(v), F16Bits>) {
          return f16_to_f32_exact(v);
        } else {
          return v;
        }
      },
      s);
}

bool representable_in_f16(F32Bits x) {
  if (x.is_nan()) return true;
  return f16_to_f32_exact(f32_to_f16(x, RoundingMode::rne)) == x;
}

}  // namespace tcsem
