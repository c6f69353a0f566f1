#include "tcsem/numeric_text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>

#include "tcsem/exact.hpp"

namespace tcsem {

namespace mp = boost::multiprecision;
using Integer = ExactDyadic::Integer;

std::string_view to_string(Width w) {
  switch (w) {
    case Width::f16: return "f16";
    case Width::f32: return "f32";
    case Width::f64: return "f64";
  }
  return "?";
}

namespace {

template <class Format>
constexpr Width width_of() {
  if constexpr (std::is_same_v<Format, Binary16>) {
    return Width::f16;
  } else if constexpr (std::is_same_v<Format, Binary32>) {
    return Width::f32;
  } else {
    return Width::f64;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

[[noreturn]] void fail(std::string_view text, std::string_view why) {
  throw ParseError("cannot parse '" + std::string(text) + "': " + std::string(why));
}

// value = (-1)^negative * numerator / denominator * 2^exp2; denominator is odd.
struct Rational {
  enum class Kind { finite, infinite, nan } kind = Kind::finite;
  bool negative = false;
  Integer numerator = 0;
  Integer denominator = 1;
  std::int64_t exp2 = 0;
};

struct Scanned {
  std::optional<Width> width;
  bool is_pattern = false;
  std::uint64_t pattern = 0;
  Rational value;
};

std::int64_t parse_int(std::string_view whole, std::string_view s) {
  if (s.empty()) fail(whole, "missing exponent digits");
  std::int64_t v = 0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) fail(whole, "bad exponent");
  if (v > 100000 || v < -100000) fail(whole, "exponent out of range");
  return v;
}

// Decimal significand with optional fraction and e-exponent, into n * 10^e10.
void parse_decimal(std::string_view whole, std::string_view s, Rational& r) {
  std::int64_t e10 = 0;
  const auto epos = s.find_first_of("eE");
  if (epos != std::string_view::npos) {
    e10 = parse_int(whole, s.substr(epos + 1));
    s = s.substr(0, epos);
  }
  Integer n = 0;
  bool any = false;
  bool dot = false;
  for (char c : s) {
    if (c == '.') {
      if (dot) fail(whole, "two decimal points");
      dot = true;
      continue;
    }
    if (c < '0' || c > '9') fail(whole, "unexpected character");
    n = n * 10 + (c - '0');
    any = true;
    if (dot) --e10;
  }
  if (!any) fail(whole, "no digits");
  r.numerator = n;
  if (e10 >= 0) {
    r.numerator *= mp::pow(Integer(10), static_cast<unsigned>(e10));
  } else {
    const auto k = static_cast<unsigned>(-e10);
    r.denominator = mp::pow(Integer(5), k);
    r.exp2 -= k;
  }
}

void parse_hex_float(std::string_view whole, std::string_view s, Rational& r) {
  const auto ppos = s.find_first_of("pP");
  if (ppos == std::string_view::npos) fail(whole, "hex float needs a p exponent");
  std::int64_t e2 = parse_int(whole, s.substr(ppos + 1));
  Integer n = 0;
  bool any = false;
  bool dot = false;
  for (char c : s.substr(0, ppos)) {
    if (c == '.') {
      if (dot) fail(whole, "two radix points");
      dot = true;
      continue;
    }
    const int h = hex_value(c);
    if (h < 0) fail(whole, "unexpected character");
    n = n * 16 + h;
    any = true;
    if (dot) e2 -= 4;
  }
  if (!any) fail(whole, "no digits");
  r.numerator = n;
  r.exp2 = e2;
}

Scanned scan(std::string_view text) {
  const std::string_view whole = text;
  text = trim(text);
  Scanned out;
  if (text.empty()) fail(whole, "empty literal");

  const char* const suffixes[] = {"f16", "f32", "f64"};
  const Width widths[] = {Width::f16, Width::f32, Width::f64};

  bool negative = false;
  std::string_view body = text;
  if (body.front() == '+' || body.front() == '-') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  const bool hex = body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X');
  if (hex && body.find_first_of("pP.") == std::string_view::npos) {
    if (text.front() == '+' || text.front() == '-') fail(whole, "a bit pattern cannot carry a sign");
    const std::string_view digits = body.substr(2);
    if (digits.size() != 4 && digits.size() != 8 && digits.size() != 16) {
      fail(whole, "bit pattern needs 4, 8 or 16 hex digits");
    }
    std::uint64_t v = 0;
    for (char c : digits) {
      const int h = hex_value(c);
      if (h < 0) fail(whole, "bad hex digit");
      v = (v << 4) | static_cast<std::uint64_t>(h);
    }
    out.is_pattern = true;
    out.pattern = v;
    out.width = digits.size() == 4 ? Width::f16 : (digits.size() == 8 ? Width::f32 : Width::f64);
    return out;
  }

  for (int i = 0; i < 3; ++i) {
    const std::string_view suf = suffixes[i];
    if (body.size() > suf.size() && iequals(body.substr(body.size() - suf.size()), suf)) {
      out.width = widths[i];
      body.remove_suffix(suf.size());
      break;
    }
  }

  Rational& r = out.value;
  r.negative = negative;
  if (iequals(body, "inf") || iequals(body, "infinity")) {
    r.kind = Rational::Kind::infinite;
    return out;
  }
  if (iequals(body, "nan")) {
    r.kind = Rational::Kind::nan;
    return out;
  }
  if (hex) {
    parse_hex_float(whole, body.substr(2), r);
    return out;
  }
  // m·2^e (UTF-8 middle dot) or m*2^e
  std::size_t mark = body.find("\xC2\xB7" "2^");
  std::size_t mark_len = 4;
  if (mark == std::string_view::npos) {
    mark = body.find("*2^");
    mark_len = 3;
  }
  if (mark != std::string_view::npos) {
    parse_decimal(whole, body.substr(0, mark), r);
    r.exp2 += parse_int(whole, body.substr(mark + mark_len));
    return out;
  }
  parse_decimal(whole, body, r);
  return out;
}

template <class Format>
FloatBits<Format> round_rational(std::string_view whole, const Rational& r) {
  using Bits = FloatBits<Format>;
  switch (r.kind) {
    case Rational::Kind::nan: return Bits::canonical_nan();
    case Rational::Kind::infinite: return Bits::infinity(r.negative);
    case Rational::Kind::finite: break;
  }
  if (r.numerator == 0) return Bits::zero(r.negative);
  // Quotient with 60-62 significant bits; a nonzero remainder is jammed into bit 0.
  const auto nb = static_cast<std::int64_t>(mp::msb(r.numerator));
  const auto db = static_cast<std::int64_t>(mp::msb(r.denominator));
  const std::int64_t s = 61 - (nb - db);
  Integer q;
  Integer rem;
  if (s >= 0) {
    mp::divide_qr(Integer(r.numerator << static_cast<unsigned>(s)), r.denominator, q, rem);
  } else {
    mp::divide_qr(r.numerator, Integer(r.denominator << static_cast<unsigned>(-s)), q, rem);
  }
  auto sig = q.convert_to<std::uint64_t>();
  const bool sticky = rem != 0;
  if (sticky) sig |= 1;
  const std::int64_t e = r.exp2 - s;
  if (e > 1'000'000 || e < -1'000'000) fail(whole, "out of range");
  const auto out = round_pack<Format>(r.negative, sig, static_cast<std::int32_t>(e), RoundingMode::rne);
  if (out.overflow) fail(whole, "magnitude exceeds the largest finite value");
  if (out.halfway && !sticky) fail(whole, "exactly halfway between two representable values");
  return out.value;
}

template <class Format>
FloatBits<Format> from_scanned(std::string_view text, const Scanned& sc) {
  using S = typename Format::storage;
  if (sc.is_pattern) return FloatBits<Format>{static_cast<S>(sc.pattern)};
  return round_rational<Format>(text, sc.value);
}

}  // namespace

Literal parse_literal(std::string_view text, Width fallback) {
  const Scanned sc = scan(text);
  const Width w = sc.width.value_or(fallback);
  switch (w) {
    case Width::f16: return {w, from_scanned<Binary16>(text, sc).bits};
    case Width::f32: return {w, from_scanned<Binary32>(text, sc).bits};
    case Width::f64: return {w, from_scanned<Binary64>(text, sc).bits};
  }
  fail(text, "unknown width");
}

template <class Format>
FloatBits<Format> parse_float(std::string_view text) {
  const Scanned sc = scan(text);
  if (sc.width && *sc.width != width_of<Format>()) {
    fail(text, "literal is " + std::string(to_string(*sc.width)) + ", expected " +
                   std::string(to_string(width_of<Format>())));
  }
  return from_scanned<Format>(text, sc);
}

MixedScalar parse_mixed(std::string_view text, Width fallback) {
  const Literal lit = parse_literal(text, fallback);
  switch (lit.width) {
    case Width::f16: return F16Bits{static_cast<std::uint16_t>(lit.bits)};
    case Width::f32: return F32Bits{static_cast<std::uint32_t>(lit.bits)};
    case Width::f64: break;
  }
  fail(text, "only f16 or f32 is accepted here");
}

template <class Format>
std::vector<FloatBits<Format>> parse_float_list(std::string_view text, char sep) {
  std::vector<FloatBits<Format>> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    out.push_back(parse_float<Format>(text.substr(start, end == std::string_view::npos ? end : end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

template <class Format>
std::string format_hex(FloatBits<Format> x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%0*llX", Format::total_bits / 4, static_cast<unsigned long long>(x.bits));
  return buf;
}

namespace {

std::string pow2_string(bool negative, const Integer& significand, std::int64_t exponent) {
  const auto lead = static_cast<std::size_t>(mp::msb(significand));
  // significand / 2^lead has an exact decimal expansion with `lead` fraction digits.
  const Integer scaled = significand * mp::pow(Integer(5), static_cast<unsigned>(lead));
  std::string digits = scaled.str();
  if (digits.size() <= lead) digits.insert(0, lead + 1 - digits.size(), '0');
  std::string m = digits.substr(0, digits.size() - lead);
  std::string frac = digits.substr(digits.size() - lead);
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  if (!frac.empty()) m += "." + frac;
  return (negative ? "-" : "+") + m + "\xC2\xB7" "2^" + std::to_string(exponent + static_cast<std::int64_t>(lead));
}

}  // namespace

template <class Format>
std::string format_pow2(FloatBits<Format> x) {
  const Unpacked u = decode(x);
  const std::string sign = u.negative ? "-" : "+";
  switch (u.cls) {
    case FloatClass::nan: return "nan";
    case FloatClass::infinite: return sign + "inf";
    case FloatClass::zero: return sign + "0";
    default: break;
  }
  return pow2_string(u.negative, Integer(u.significand), u.exponent);
}

std::string format_pow2(const ExactDyadic& x) {
  if (x.is_nan()) return "nan";
  const std::string sign = x.negative() ? "-" : "+";
  if (!x.is_finite()) return sign + "inf";
  if (x.is_zero()) return sign + "0";
  return pow2_string(x.negative(), x.mantissa(), x.exponent());
}

template <class Format>
std::string format_decimal(FloatBits<Format> x) {
  char buf[64];
  std::to_chars_result res{};
  if constexpr (std::is_same_v<Format, Binary64>) {
    res = std::to_chars(buf, buf + sizeof buf, to_double(x));
  } else if constexpr (std::is_same_v<Format, Binary32>) {
    res = std::to_chars(buf, buf + sizeof buf, to_float(x));
  } else {
    res = std::to_chars(buf, buf + sizeof buf, to_float(f16_to_f32_exact(x)));
  }
  return std::string(buf, res.ptr);
}

std::string format_hex(const MixedScalar& x) {
  return std::visit([](auto v) { return format_hex(v); }, x);
}
std::string format_pow2(const MixedScalar& x) {
  return std::visit([](auto v) { return format_pow2(v); }, x);
}
std::string format_decimal(const MixedScalar& x) {
  return std::visit([](auto v) { return format_decimal(v); }, x);
}

#define TCSEM_INSTANTIATE(F)                                                            \
  template FloatBits<F> parse_float<F>(std::string_view);                              \
  template std::vector<FloatBits<F>> parse_float_list<F>(std::string_view, char);      \
  template std::string format_hex<F>(FloatBits<F>);                                     \
  template std::string format_pow2<F>(FloatBits<F>);                                    \
  template std::string format_decimal<F>(FloatBits<F>);

TCSEM_INSTANTIATE(Binary16)
TCSEM_INSTANTIATE(Binary32)
TCSEM_INSTANTIATE(Binary64)

#undef TCSEM_INSTANTIATE

}  // namespace tcsem
