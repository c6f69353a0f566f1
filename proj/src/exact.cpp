#include "tcsem/exact.hpp"

#include <cmath>
#include <sstream>

namespace tcsem {

namespace mp = boost::multiprecision;

ExactDyadic ExactDyadic::finite(bool negative, Integer mantissa, std::int64_t exponent) {
  ExactDyadic d;
  if (mantissa < 0) {
    negative = !negative;
    mantissa = -mantissa;
  }
  d.negative_ = negative;
  if (mantissa == 0) {
    d.exponent_ = 0;
    return d;
  }
  const auto tz = mp::lsb(mantissa);
  if (tz > 0) {
    mantissa >>= tz;
    exponent += static_cast<std::int64_t>(tz);
  }
  d.mantissa_ = std::move(mantissa);
  d.exponent_ = exponent;
  return d;
}

ExactDyadic ExactDyadic::from_int(std::int64_t v) {
  return finite(false, Integer(v), 0);
}

ExactDyadic ExactDyadic::pow2(std::int64_t exponent, bool negative) { return finite(negative, 1, exponent); }

ExactDyadic ExactDyadic::infinity(bool negative) {
  ExactDyadic d;
  d.kind_ = Kind::infinite;
  d.negative_ = negative;
  return d;
}

ExactDyadic ExactDyadic::nan() {
  ExactDyadic d;
  d.kind_ = Kind::nan;
  return d;
}

ExactDyadic ExactDyadic::operator-() const {
  ExactDyadic d = *this;
  if (kind_ != Kind::nan) d.negative_ = !negative_;
  return d;
}

ExactDyadic ExactDyadic::abs() const {
  ExactDyadic d = *this;
  d.negative_ = false;
  return d;
}

ExactDyadic operator+(const ExactDyadic& a, const ExactDyadic& b) {
  using Kind = ExactDyadic::Kind;
  if (a.is_nan() || b.is_nan()) return ExactDyadic::nan();
  if (a.kind_ == Kind::infinite || b.kind_ == Kind::infinite) {
    if (a.kind_ == Kind::infinite && b.kind_ == Kind::infinite && a.negative_ != b.negative_) {
      return ExactDyadic::nan();
    }
    return a.kind_ == Kind::infinite ? a : b;
  }
  if (a.is_zero() && b.is_zero()) {
    ExactDyadic z;
    z.negative_ = a.negative_ && b.negative_;
    return z;
  }
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const std::int64_t e = std::min(a.exponent_, b.exponent_);
  ExactDyadic::Integer ma = a.mantissa_ << static_cast<unsigned>(a.exponent_ - e);
  ExactDyadic::Integer mb = b.mantissa_ << static_cast<unsigned>(b.exponent_ - e);
  if (a.negative_) ma = -ma;
  if (b.negative_) mb = -mb;
  return ExactDyadic::finite(false, ma + mb, e);
}

ExactDyadic operator*(const ExactDyadic& a, const ExactDyadic& b) {
  using Kind = ExactDyadic::Kind;
  if (a.is_nan() || b.is_nan()) return ExactDyadic::nan();
  const bool neg = a.negative_ != b.negative_;
  if (a.kind_ == Kind::infinite || b.kind_ == Kind::infinite) {
    if (a.is_zero() || b.is_zero()) return ExactDyadic::nan();
    return ExactDyadic::infinity(neg);
  }
  return ExactDyadic::finite(neg, a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_);
}

std::partial_ordering operator<=>(const ExactDyadic& a, const ExactDyadic& b) {
  using Kind = ExactDyadic::Kind;
  if (a.is_nan() || b.is_nan()) return std::partial_ordering::unordered;
  auto rank = [](const ExactDyadic& x) {
    if (x.kind_ == Kind::infinite) return x.negative_ ? -1 : 1;
    return 0;
  };
  const int ra = rank(a);
  const int rb = rank(b);
  if (ra != 0 || rb != 0) return ra <=> rb;
  const ExactDyadic d = a - b;
  if (d.is_zero()) return std::partial_ordering::equivalent;
  return d.negative_ ? std::partial_ordering::less : std::partial_ordering::greater;
}

std::string ExactDyadic::to_string() const {
  if (kind_ == Kind::nan) return "nan";
  const char sign = negative_ ? '-' : '+';
  if (kind_ == Kind::infinite) return std::string(1, sign) + "inf";
  if (mantissa_ == 0) return std::string(1, sign) + "0";
  std::ostringstream os;
  os << sign << mantissa_ << "·2^" << exponent_;
  return os.str();
}

double ExactDyadic::to_double() const {
  if (kind_ == Kind::nan) return std::nan("");
  if (kind_ == Kind::infinite) return negative_ ? -HUGE_VAL : HUGE_VAL;
  return tcsem::to_double(round_exact<Binary64>(*this, RoundingMode::rne));
}

}  // namespace tcsem
