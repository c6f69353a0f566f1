#include "tcsem/accumulator.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

#include "tcsem/numeric_text.hpp"

namespace tcsem {

AccumulatorConfig preset_config(ArchPreset arch) {
  AccumulatorConfig cfg;
  switch (arch) {
    case ArchPreset::volta:
    case ArchPreset::turing:
      cfg.k_products = 4;
      cfg.guard_bits = 0;
      cfg.carry_bits = 3;
      break;
    case ArchPreset::ampere:
      cfg.k_products = 8;
      cfg.guard_bits = 1;
      cfg.carry_bits = 4;
      break;
  }
  return cfg;
}

std::string_view to_string(ArchPreset arch) {
  switch (arch) {
    case ArchPreset::volta: return "volta";
    case ArchPreset::turing: return "turing";
    case ArchPreset::ampere: return "ampere";
  }
  return "?";
}

ArchPreset parse_arch(std::string_view name) {
  if (name == "volta") return ArchPreset::volta;
  if (name == "turing") return ArchPreset::turing;
  if (name == "ampere") return ArchPreset::ampere;
  throw std::invalid_argument("unknown architecture '" + std::string(name) + "' (expected volta, turing or ampere)");
}

void validate(const AccumulatorConfig& cfg) {
  if (cfg.k_products < 1 || cfg.k_products > 64) {
    throw std::invalid_argument("k_products must be in [1, 64], got " + std::to_string(cfg.k_products));
  }
  if (cfg.guard_bits < 0 || cfg.guard_bits > 16) {
    throw std::invalid_argument("guard_bits must be in [0, 16], got " + std::to_string(cfg.guard_bits));
  }
  if (cfg.carry_bits < 0 || cfg.carry_bits > 16) {
    throw std::invalid_argument("carry_bits must be in [0, 16], got " + std::to_string(cfg.carry_bits));
  }
}

std::string describe(const AccumulatorConfig& cfg) {
  std::ostringstream os;
  os << "k=" << cfg.k_products << " guard=" << cfg.guard_bits << " carry=" << cfg.carry_bits
     << " width=" << cfg.significand_width()
     << " out=" << (cfg.out_precision == OutputPrecision::f32 ? "f32" : "f16");
  if (cfg.out_precision == OutputPrecision::f16) os << " fp16_rounding=" << to_string(cfg.fp16_final_rounding);
  return os.str();
}

namespace {

SpecialTag scan_specials(std::span<const F32Bits> terms) {
  bool nan = false;
  bool pos_inf = false;
  bool neg_inf = false;
  for (const F32Bits t : terms) {
    if (t.is_nan()) nan = true;
    if (t.is_inf()) (t.sign() ? neg_inf : pos_inf) = true;
  }
  if (nan || (pos_inf && neg_inf)) return SpecialTag::nan;
  if (pos_inf) return SpecialTag::positive_infinity;
  if (neg_inf) return SpecialTag::negative_infinity;
  return SpecialTag::none;
}

std::int32_t max_exponent_of(std::span<const F32Bits> terms) {
  std::int32_t e = kNoExponent;
  for (const F32Bits t : terms) {
    if (!t.is_zero()) e = std::max(e, alignment_exponent(t));
  }
  return e;
}

std::uint64_t aligned_magnitude(F32Bits t, std::int32_t max_exponent, int guard_bits) {
  if (t.is_zero()) return 0;
  const std::uint64_t sig = decode(t).significand << guard_bits;
  const std::int64_t shift = std::int64_t{max_exponent} - alignment_exponent(t);
  return shift >= 64 ? 0 : sig >> shift;
}

std::int64_t wrap_field(std::uint64_t acc, int width) {
  const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
  std::uint64_t v = acc & mask;
  if (v & (std::uint64_t{1} << (width - 1))) v |= ~mask;
  return static_cast<std::int64_t>(v);
}

// Allocation-free align + accumulate for the hot path.
RawSum sum_terms(std::span<const F32Bits> terms, const AccumulatorConfig& cfg) {
  RawSum raw;
  raw.special = scan_specials(terms);
  if (raw.special != SpecialTag::none) return raw;
  raw.max_exponent = max_exponent_of(terms);
  if (raw.max_exponent == kNoExponent) return raw;
  std::uint64_t acc = 0;
  for (const F32Bits t : terms) {
    const std::uint64_t mag = aligned_magnitude(t, raw.max_exponent, cfg.guard_bits);
    acc += t.sign() ? (0 - mag) : mag;
  }
  raw.value = wrap_field(acc, cfg.sum_field_width());
  return raw;
}

struct Normalized {
  std::uint32_t significand = 0;
  std::int32_t exponent = kNoExponent;
  F32Bits value;
};

Normalized normalize_detail(const RawSum& raw, const AccumulatorConfig& cfg) {
  Normalized n;
  switch (raw.special) {
    case SpecialTag::nan: n.value = F32Bits::canonical_nan(); return n;
    case SpecialTag::positive_infinity: n.value = F32Bits::infinity(false); return n;
    case SpecialTag::negative_infinity: n.value = F32Bits::infinity(true); return n;
    case SpecialTag::none: break;
  }
  if (raw.value == 0 || raw.max_exponent == kNoExponent) {
    n.value = F32Bits::zero(false);
    return n;
  }
  const bool negative = raw.value < 0;
  const std::uint64_t mag = negative ? 0 - static_cast<std::uint64_t>(raw.value) : static_cast<std::uint64_t>(raw.value);
  const std::uint32_t sign = negative ? F32Bits::sign_mask : 0u;
  const int lead = std::bit_width(mag) - 1;
  const std::int64_t lsb_exp = std::int64_t{raw.max_exponent} - 23 - cfg.guard_bits;
  const std::int64_t exponent = lsb_exp + lead;
  if (exponent > Binary32::emax) {
    n.value = F32Bits::infinity(negative);
    return n;
  }
  if (exponent >= Binary32::emin) {
    const std::uint64_t sig = lead > 23 ? mag >> (lead - 23) : mag << (23 - lead);
    n.significand = static_cast<std::uint32_t>(sig);
    n.exponent = static_cast<std::int32_t>(exponent);
    n.value = F32Bits{sign | (static_cast<std::uint32_t>(exponent + Binary32::bias) << 23) |
                      (n.significand & F32Bits::fraction_mask)};
    return n;
  }
  // Below the normal range: truncate onto the 2^-149 grid.
  const std::int64_t shift = (Binary32::emin - 23) - lsb_exp;
  std::uint64_t frac = 0;
  if (shift >= 64) {
    frac = 0;
  } else if (shift >= 0) {
    frac = mag >> shift;
  } else {
    frac = mag << (-shift);
  }
  n.significand = static_cast<std::uint32_t>(frac);
  n.exponent = Binary32::emin;
  n.value = F32Bits{sign | n.significand};
  return n;
}

MixedScalar finish(F32Bits truncated, const AccumulatorConfig& cfg) {
  if (cfg.out_precision == OutputPrecision::f16) return f32_to_f16(truncated, cfg.fp16_final_rounding);
  return truncated;
}

void check_lengths(std::size_t na, std::size_t nb, const AccumulatorConfig& cfg) {
  if (na != static_cast<std::size_t>(cfg.k_products) || nb != static_cast<std::size_t>(cfg.k_products)) {
    throw std::invalid_argument("tensor_dot: expected " + std::to_string(cfg.k_products) + "-element vectors, got " +
                                std::to_string(na) + " and " + std::to_string(nb));
  }
}

// Small-buffer storage for products + c.
class TermBuffer {
 public:
  explicit TermBuffer(std::size_t n) : size_(n) {
    if (n > inline_.size()) heap_.resize(n);
  }
  F32Bits* data() { return heap_.empty() ? inline_.data() : heap_.data(); }
  std::span<const F32Bits> view() { return {data(), size_}; }

 private:
  std::array<F32Bits, 17> inline_{};
  std::vector<F32Bits> heap_;
  std::size_t size_;
};

}  // namespace

AlignedTermSet align_terms(std::span<const F32Bits> products, F32Bits c, const AccumulatorConfig& cfg) {
  if (products.size() != static_cast<std::size_t>(cfg.k_products)) {
    throw std::invalid_argument("align_terms: expected " + std::to_string(cfg.k_products) + " products, got " +
                                std::to_string(products.size()));
  }
  std::vector<F32Bits> terms(products.begin(), products.end());
  terms.push_back(c);
  AlignedTermSet set;
  set.special = scan_specials(terms);
  set.max_exponent = max_exponent_of(terms);
  set.terms.reserve(terms.size());
  for (const F32Bits t : terms) {
    AlignedTerm at;
    at.negative = t.sign();
    if (set.special == SpecialTag::none && set.max_exponent != kNoExponent) {
      at.magnitude = aligned_magnitude(t, set.max_exponent, cfg.guard_bits);
    }
    set.terms.push_back(at);
  }
  return set;
}

RawSum accumulate(const AlignedTermSet& aligned, const AccumulatorConfig& cfg) {
  RawSum raw;
  raw.special = aligned.special;
  raw.max_exponent = aligned.max_exponent;
  if (raw.special != SpecialTag::none) return raw;
  std::uint64_t acc = 0;
  for (const AlignedTerm& t : aligned.terms) acc += t.negative ? (0 - t.magnitude) : t.magnitude;
  raw.value = wrap_field(acc, cfg.sum_field_width());
  return raw;
}

F32Bits normalize_truncate(const RawSum& raw, const AccumulatorConfig& cfg) {
  return normalize_detail(raw, cfg).value;
}

MixedScalar normalize_round(const RawSum& raw, const AccumulatorConfig& cfg) {
  return finish(normalize_truncate(raw, cfg), cfg);
}

ExactDyadic DotTrace::partial_value(std::size_t count) const {
  if (aligned.max_exponent == kNoExponent || aligned.special != SpecialTag::none) return {};
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < count && i < aligned.terms.size(); ++i) {
    const AlignedTerm& t = aligned.terms[i];
    acc += t.negative ? (0 - t.magnitude) : t.magnitude;
  }
  const std::int64_t v = wrap_field(acc, config.sum_field_width());
  return ExactDyadic::finite(false, ExactDyadic::Integer(v),
                             std::int64_t{aligned.max_exponent} - 23 - config.guard_bits);
}

MixedScalar accumulate_terms(std::span<const F32Bits> products, F32Bits c, const AccumulatorConfig& cfg) {
  if (products.size() != static_cast<std::size_t>(cfg.k_products)) {
    throw std::invalid_argument("accumulate_terms: expected " + std::to_string(cfg.k_products) + " products");
  }
  TermBuffer buf(products.size() + 1);
  std::copy(products.begin(), products.end(), buf.data());
  buf.data()[products.size()] = c;
  return finish(normalize_detail(sum_terms(buf.view(), cfg), cfg).value, cfg);
}

DotTrace accumulate_terms_traced(std::span<const F32Bits> products, F32Bits c, const AccumulatorConfig& cfg) {
  DotTrace tr;
  tr.config = cfg;
  tr.terms.assign(products.begin(), products.end());
  tr.terms.push_back(c);
  tr.aligned = align_terms(products, c, cfg);
  tr.raw = accumulate(tr.aligned, cfg);
  const Normalized n = normalize_detail(tr.raw, cfg);
  tr.normalized_significand = n.significand;
  tr.normalized_exponent = n.exponent;
  tr.truncated = n.value;
  tr.result = finish(n.value, cfg);
  return tr;
}

MixedScalar tensor_dot(std::span<const F16Bits> a, std::span<const F16Bits> b, const MixedScalar& c,
                       const AccumulatorConfig& cfg) {
  check_lengths(a.size(), b.size(), cfg);
  TermBuffer buf(a.size() + 1);
  F32Bits* t = buf.data();
  for (std::size_t i = 0; i < a.size(); ++i) t[i] = mul_f16_exact(a[i], b[i]);
  t[a.size()] = widen(c);
  return finish(normalize_detail(sum_terms(buf.view(), cfg), cfg).value, cfg);
}

MixedScalar tensor_dot(std::span<const F16Bits> a, std::span<const F16Bits> b, const MixedScalar& c,
                       ArchPreset arch) {
  return tensor_dot(a, b, c, preset_config(arch));
}

DotTrace tensor_dot_traced(std::span<const F16Bits> a, std::span<const F16Bits> b, const MixedScalar& c,
                           const AccumulatorConfig& cfg) {
  check_lengths(a.size(), b.size(), cfg);
  std::vector<F32Bits> products(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) products[i] = mul_f16_exact(a[i], b[i]);
  return accumulate_terms_traced(products, widen(c), cfg);
}

MixedScalar replay(const DotTrace& trace) {
  if (trace.terms.empty()) throw std::invalid_argument("replay: empty trace");
  const std::span<const F32Bits> all(trace.terms);
  const AlignedTermSet aligned = align_terms(all.first(all.size() - 1), all.back(), trace.config);
  return normalize_round(accumulate(aligned, trace.config), trace.config);
}

std::string format_trace(const DotTrace& tr) {
  std::ostringstream os;
  const auto& cfg = tr.config;
  os << "config " << describe(cfg) << '\n';
  for (std::size_t i = 0; i < tr.terms.size(); ++i) {
    const bool addend = i + 1 == tr.terms.size();
    os << (addend ? "addend " : "product ") << (addend ? std::string("c") : std::to_string(i)) << ' '
       << format_hex(tr.terms[i]) << ' ' << format_pow2(tr.terms[i]) << '\n';
  }
  const char* special = "none";
  switch (tr.aligned.special) {
    case SpecialTag::nan: special = "nan"; break;
    case SpecialTag::positive_infinity: special = "+inf"; break;
    case SpecialTag::negative_infinity: special = "-inf"; break;
    case SpecialTag::none: break;
  }
  os << "special " << special << '\n';
  if (tr.aligned.max_exponent == kNoExponent) {
    os << "max_exponent none\n";
  } else {
    os << "max_exponent " << tr.aligned.max_exponent << '\n';
    os << "grid 2^" << (tr.aligned.max_exponent - 23 - cfg.guard_bits) << '\n';
  }
  const auto unit = std::int64_t{tr.aligned.max_exponent} - 23 - cfg.guard_bits;
  for (std::size_t i = 0; i < tr.aligned.terms.size(); ++i) {
    const AlignedTerm& t = tr.aligned.terms[i];
    std::ostringstream hex;
    hex << std::hex << std::uppercase << t.magnitude;
    const ExactDyadic v = tr.aligned.max_exponent == kNoExponent
                              ? ExactDyadic{}
                              : ExactDyadic::finite(t.negative, ExactDyadic::Integer(t.magnitude), unit);
    os << "aligned " << i << ' ' << (t.negative ? '-' : '+') << "0x" << hex.str() << ' ' << format_pow2(v)
       << '\n';
  }
  {
    const std::int64_t v = tr.raw.value;
    const std::uint64_t mag = v < 0 ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
    std::ostringstream hex;
    hex << std::hex << std::uppercase << mag;
    os << "raw_sum " << (v < 0 ? '-' : '+') << "0x" << hex.str() << ' ' << format_pow2(tr.raw_value()) << '\n';
  }
  {
    std::ostringstream hex;
    hex << std::hex << std::uppercase << tr.normalized_significand;
    os << "normalized 0x" << hex.str() << " exponent ";
    if (tr.normalized_exponent == kNoExponent) {
      os << "none";
    } else {
      os << tr.normalized_exponent;
    }
    os << '\n';
  }
  os << "truncated " << format_hex(tr.truncated) << ' ' << format_pow2(tr.truncated) << '\n';
  os << "result " << (std::holds_alternative<F16Bits>(tr.result) ? "f16 " : "f32 ") << format_hex(tr.result) << ' '
     << format_pow2(tr.result) << '\n';
  return os.str();
}

F32Bits ieee_sequential_dot(std::span<const F16Bits> a, std::span<const F16Bits> b, F32Bits c, RoundingMode rm,
                            std::span<const std::size_t> order) {
  if (a.size() != b.size()) throw std::invalid_argument("ieee_sequential_dot: vector lengths differ");
  const std::size_t n = a.size() + 1;
  if (order.size() != n) throw std::invalid_argument("ieee_sequential_dot: order must list every term once");
  std::vector<bool> seen(n, false);
  for (const std::size_t i : order) {
    if (i >= n || seen[i]) throw std::invalid_argument("ieee_sequential_dot: order is not a permutation");
    seen[i] = true;
  }
  auto term = [&](std::size_t i) { return i == a.size() ? c : mul_f16_exact(a[i], b[i]); };
  F32Bits acc = term(order[0]);
  for (std::size_t i = 1; i < n; ++i) acc = add_f32_ieee(acc, term(order[i]), rm);
  return acc;
}

F32Bits ieee_sequential_dot(std::span<const F16Bits> a, std::span<const F16Bits> b, F32Bits c, RoundingMode rm) {
  std::vector<std::size_t> order(a.size() + 1);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return ieee_sequential_dot(a, b, c, rm, order);
}

ExactDyadic exact_dot(std::span<const F16Bits> a, std::span<const F16Bits> b, const MixedScalar& c) {
  if (a.size() != b.size()) throw std::invalid_argument("exact_dot: vector lengths differ");
  ExactDyadic sum = to_exact(c);
  for (std::size_t i = 0; i < a.size(); ++i) sum = sum + to_exact(a[i]) * to_exact(b[i]);
  return sum;
}

}  // namespace tcsem
