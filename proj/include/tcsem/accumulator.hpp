#pragma once

// Multi-term dot-product unit of Volta/Turing/Ampere tensor cores.
//
// Products of FP16 pairs are formed exactly in FP32. All products plus the
// addend are aligned to the largest exponent by right shifts that discard the
// shifted-out bits (Ampere keeps one extra guard bit), summed as integers with
// a few carry bits on top and no intermediate normalization, then normalized
// once with truncation. FP16 output is rounded to nearest from that FP32 value.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tcsem/bitfloat.hpp"
#include "tcsem/exact.hpp"

namespace tcsem {

enum class OutputPrecision : std::uint8_t { f32, f16 };

struct AccumulatorConfig {
  int k_products = 4;
  int guard_bits = 0;  // low-order bits kept through the alignment shift
  int carry_bits = 3;  // high-order headroom of the integer sum
  OutputPrecision out_precision = OutputPrecision::f32;
  RoundingMode fp16_final_rounding = RoundingMode::rne;

  /// Width of an aligned magnitude plus carry headroom: 27 on Volta, 29 on Ampere.
  int significand_width() const { return 24 + guard_bits + carry_bits; }
  /// Two's-complement field used for the sum: one sign bit above significand_width().
  int sum_field_width() const { return significand_width() + 1; }

  friend bool operator==(const AccumulatorConfig&, const AccumulatorConfig&) = default;
};

enum class ArchPreset : std::uint8_t { volta, turing, ampere };

AccumulatorConfig preset_config(ArchPreset arch);
std::string_view to_string(ArchPreset arch);
ArchPreset parse_arch(std::string_view name);  // throws std::invalid_argument

/// Throws std::invalid_argument when the configuration cannot be evaluated.
void validate(const AccumulatorConfig& cfg);

std::string describe(const AccumulatorConfig& cfg);

inline constexpr std::int32_t kNoExponent = std::numeric_limits<std::int32_t>::min();

enum class SpecialTag : std::uint8_t { none, nan, positive_infinity, negative_infinity };

struct AlignedTerm {
  bool negative = false;
  std::uint64_t magnitude = 0;  // in units of 2^(max_exponent - 23 - guard_bits)

  friend bool operator==(const AlignedTerm&, const AlignedTerm&) = default;
};

struct AlignedTermSet {
  std::int32_t max_exponent = kNoExponent;
  std::vector<AlignedTerm> terms;
  SpecialTag special = SpecialTag::none;
};

struct RawSum {
  std::int64_t value = 0;  // sign-extended contents of the sum field
  std::int32_t max_exponent = kNoExponent;
  SpecialTag special = SpecialTag::none;
};

/// Step 2-3: largest exponent over finite nonzero terms, then truncating right
/// shifts onto the common grid. `products.size()` must equal cfg.k_products;
/// the addend is appended as the last term.
AlignedTermSet align_terms(std::span<const F32Bits> products, F32Bits c, const AccumulatorConfig& cfg);

/// Step 5: wrap-around integer sum in a field of cfg.sum_field_width() bits.
RawSum accumulate(const AlignedTermSet& aligned, const AccumulatorConfig& cfg);

/// Step 6-7: single normalization with truncation of the magnitude.
F32Bits normalize_truncate(const RawSum& raw, const AccumulatorConfig& cfg);

/// Step 6-8: normalize_truncate, then round to FP16 when cfg asks for it.
MixedScalar normalize_round(const RawSum& raw, const AccumulatorConfig& cfg);

struct DotTrace {
  AccumulatorConfig config;
  std::vector<F32Bits> terms;  // exact products, then c
  AlignedTermSet aligned;
  RawSum raw;
  std::uint32_t normalized_significand = 0;  // 24-bit significand before packing (subnormal: fraction)
  std::int32_t normalized_exponent = kNoExponent;
  F32Bits truncated;
  MixedScalar result;

  /// Value represented by the first `count` aligned terms (sum field semantics).
  ExactDyadic partial_value(std::size_t count) const;
  ExactDyadic raw_value() const { return partial_value(aligned.terms.size()); }
};

/// Full pipeline; a and b must hold cfg.k_products elements.
MixedScalar tensor_dot(std::span<const F16Bits> a, std::span<const F16Bits> b, const MixedScalar& c,
                       const AccumulatorConfig& cfg);
MixedScalar tensor_dot(std::span<const F16Bits> a, std::span<const F16Bits> b, const MixedScalar& c,
                       ArchPreset arch);

DotTrace tensor_dot_traced(std::span<const F16Bits> a, std::span<const F16Bits> b, const MixedScalar& c,
                           const AccumulatorConfig& cfg);

/// Same pipeline starting from already-formed FP32 terms.
DotTrace accumulate_terms_traced(std::span<const F32Bits> products, F32Bits c, const AccumulatorConfig& cfg);
MixedScalar accumulate_terms(std::span<const F32Bits> products, F32Bits c, const AccumulatorConfig& cfg);

/// Recomputes every stage from trace.terms; equal to trace.result for any trace produced here.
MixedScalar replay(const DotTrace& trace);

/// Line-oriented stage dump, stable across versions.
std::string format_trace(const DotTrace& trace);

/// Normalized reference: exact products and c folded left through IEEE FP32
/// addition. `order` permutes term indices 0..k, where index k is c.
F32Bits ieee_sequential_dot(std::span<const F16Bits> a, std::span<const F16Bits> b, F32Bits c, RoundingMode rm,
                            std::span<const std::size_t> order);
F32Bits ieee_sequential_dot(std::span<const F16Bits> a, std::span<const F16Bits> b, F32Bits c, RoundingMode rm);

/// Exact value of sum(a_i * b_i) + c.
ExactDyadic exact_dot(std::span<const F16Bits> a, std::span<const F16Bits> b, const MixedScalar& c);

}  // namespace tcsem
