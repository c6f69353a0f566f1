#pragma once

// Text forms for floating-point literals.
//
// Accepted input:
//   0x3C00 / 0x3F800000 / 0x3FF0000000000000   raw bit pattern; digit count picks the width
//   -0x1.8p-3[f16|f32|f64]                      hex float
//   +1.5·2^11 or 1.5*2^11 [suffix]              decimal significand times a power of two
//   0.75, -2e-3 [suffix]                        plain decimal
//   inf, -inf, nan [suffix]
// Anything that is not a bit pattern must round to a uniquely nearest finite
// value of the target format; exact ties and out-of-range magnitudes are rejected.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tcsem/bitfloat.hpp"

namespace tcsem {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Width : std::uint8_t { f16, f32, f64 };

std::string_view to_string(Width w);

struct Literal {
  Width width = Width::f32;
  std::uint64_t bits = 0;
};

/// Parses into `fallback` unless the text pins its own width (bit-pattern digit
/// count or an f16/f32/f64 suffix).
Literal parse_literal(std::string_view text, Width fallback);

/// Parses into a fixed format; a conflicting width in the text is an error.
template <class Format>
FloatBits<Format> parse_float(std::string_view text);

/// FP16 or FP32 scalar; FP64 literals are rejected.
MixedScalar parse_mixed(std::string_view text, Width fallback);

template <class Format>
std::vector<FloatBits<Format>> parse_float_list(std::string_view text, char sep = ',');

template <class Format>
std::string format_hex(FloatBits<Format> x);

/// `+1.5·2^11`, `-1·2^-40`, `+0`, `-inf`, `nan`. The significand is exact.
template <class Format>
std::string format_pow2(FloatBits<Format> x);

/// Shortest decimal that round-trips through the host float type.
template <class Format>
std::string format_decimal(FloatBits<Format> x);

class ExactDyadic;
/// Same `±m·2^e` rendering for an exact value of any precision.
std::string format_pow2(const ExactDyadic& x);

std::string format_hex(const MixedScalar& x);
std::string format_pow2(const MixedScalar& x);
std::string format_decimal(const MixedScalar& x);

}  // namespace tcsem
