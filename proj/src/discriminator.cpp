#include "tcsem/discriminator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "tcsem/errorcorrect.hpp"
#include "tcsem/numeric_text.hpp"

namespace tcsem {

namespace {

struct PropertyName {
  PropertyId id;
  std::string_view name;
};

constexpr PropertyName kNames[] = {
    {PropertyId::exact_mul, "exact-mul"},
    {PropertyId::accum_precision, "accum-precision"},
    {PropertyId::final_rounding, "final-rounding"},
    {PropertyId::accum_rounding, "accum-rounding"},
    {PropertyId::accum_order, "accum-order"},
    {PropertyId::normalization, "normalization"},
    {PropertyId::carry_bits, "carry-bits"},
    {PropertyId::guard_bits, "guard-bits"},
    {PropertyId::markidis_vs_ootomo, "markidis-vs-ootomo"},
};

}  // namespace

std::string_view to_string(PropertyId p) {
  for (const auto& n : kNames) {
    if (n.id == p) return n.name;
  }
  return "?";
}

PropertyId parse_property(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.id;
  }
  std::string known;
  for (const auto& n : kNames) known += (known.empty() ? "" : ", ") + std::string(n.name);
  throw std::invalid_argument("unknown property '" + std::string(name) + "' (expected one of " + known + ")");
}

namespace {

using Values = std::span<const std::uint32_t>;

enum class CandKind : std::uint8_t {
  exact,
  f16_round,   // param = rounding mode
  ieee_chain,  // param = rounding mode
  tensor,
  fp16_chain,
  fp32_chain,
  left_rtz,
  right_rtz,
  carry,       // param = carry bits
  guard,       // param = guard bits
  markidis,
  ootomo,
  oracle,
};

struct Candidate {
  std::string name;
  CandKind kind = CandKind::exact;
  int param = 0;
};

std::optional<int> suffix_number(std::string_view name, char prefix) {
  if (name.size() < 2 || name[0] != prefix) return std::nullopt;
  int v = 0;
  const auto* end = name.data() + name.size();
  const auto res = std::from_chars(name.data() + 1, end, v);
  if (res.ec != std::errc{} || res.ptr != end || v < 0 || v > 16) return std::nullopt;
  return v;
}

std::optional<RoundingMode> mode_named(std::string_view name) {
  for (const RoundingMode rm : kAllRoundingModes) {
    if (to_string(rm) == name) return rm;
  }
  return std::nullopt;
}

std::optional<Candidate> resolve_candidate(PropertyId prop, std::string_view name) {
  const std::string n(name);
  switch (prop) {
    case PropertyId::exact_mul:
      if (name == "exact") return Candidate{n, CandKind::exact, 0};
      if (name.starts_with("f16-")) {
        if (auto rm = mode_named(name.substr(4))) return Candidate{n, CandKind::f16_round, static_cast<int>(*rm)};
      }
      break;
    case PropertyId::accum_precision:
      if (name == "fp16-chain") return Candidate{n, CandKind::fp16_chain, 0};
      if (name == "fp32-chain") return Candidate{n, CandKind::fp32_chain, 0};
      if (name == "tensor") return Candidate{n, CandKind::tensor, 0};
      break;
    case PropertyId::final_rounding:
      if (name == "tensor") return Candidate{n, CandKind::tensor, 0};
      if (auto rm = mode_named(name)) return Candidate{n, CandKind::f16_round, static_cast<int>(*rm)};
      break;
    case PropertyId::accum_rounding:
      if (name == "tensor") return Candidate{n, CandKind::tensor, 0};
      if (auto rm = mode_named(name)) return Candidate{n, CandKind::ieee_chain, static_cast<int>(*rm)};
      break;
    case PropertyId::accum_order:
      if (name == "left-rtz") return Candidate{n, CandKind::left_rtz, 0};
      if (name == "right-rtz") return Candidate{n, CandKind::right_rtz, 0};
      if (name == "tensor") return Candidate{n, CandKind::tensor, 0};
      break;
    case PropertyId::normalization:
      if (name == "tensor") return Candidate{n, CandKind::tensor, 0};
      if (name == "ieee-rtz") return Candidate{n, CandKind::ieee_chain, static_cast<int>(RoundingMode::rtz)};
      if (name == "ieee-rne") return Candidate{n, CandKind::ieee_chain, static_cast<int>(RoundingMode::rne)};
      break;
    case PropertyId::carry_bits:
      if (auto w = suffix_number(name, 'w')) return Candidate{n, CandKind::carry, *w};
      break;
    case PropertyId::guard_bits:
      if (auto g = suffix_number(name, 'g')) return Candidate{n, CandKind::guard, *g};
      break;
    case PropertyId::markidis_vs_ootomo:
      if (name == "markidis") return Candidate{n, CandKind::markidis, 0};
      if (name == "ootomo") return Candidate{n, CandKind::ootomo, 0};
      if (name == "oracle") return Candidate{n, CandKind::oracle, 0};
      break;
  }
  return std::nullopt;
}

std::vector<Variable> pair_vars(int count, bool positive, bool with_c, VarType c_type = VarType::f32) {
  std::vector<Variable> v;
  for (int i = 1; i <= count; ++i) {
    v.push_back({"a" + std::to_string(i), VarType::f16, positive, false});
    v.push_back({"b" + std::to_string(i), VarType::f16, positive, false});
  }
  if (with_c) v.push_back({"c", c_type, positive, true});
  return v;
}

std::vector<std::string> names(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

Schema base_schema(PropertyId prop, const AccumulatorConfig& cfg) {
  Schema s;
  s.property = prop;
  s.default_exponent_range = {-15, 15};
  switch (prop) {
    case PropertyId::exact_mul:
      s.variables = {{"a", VarType::f16}, {"b", VarType::f16}};
      s.candidates = names({"exact", "f16-rne", "f16-rtz", "f16-rtn", "f16-rtp"});
      s.compared = {"exact", "f16-rne"};
      s.statement = "the exact FP32 product differs from its FP16 rounding under every rounding mode";
      break;
    case PropertyId::accum_precision:
      s.variables = {{"a", VarType::f16}, {"b", VarType::f16}, {"c", VarType::f16}, {"d", VarType::f16}};
      s.candidates = names({"fp16-chain", "fp32-chain", "tensor"});
      s.compared = {"fp16-chain", "fp32-chain"};
      s.statement = "a*b + c*d accumulated in FP16 differs from FP32 accumulation; products not in FP16, sum in FP16";
      break;
    case PropertyId::final_rounding:
      s.variables = {{"a", VarType::f16}, {"b", VarType::f16}};
      s.candidates = names({"rne", "rtz", "rtn", "rtp", "tensor"});
      s.compared = {"rne", "rtz"};
      s.statement = "the FP16 rounding of a single exact product differs between two rounding modes";
      break;
    case PropertyId::accum_rounding:
      s.variables = pair_vars(2, false, true);
      s.candidates = names({"tensor", "rne", "rtz", "rtn", "rtp"});
      s.compared = {"tensor", "rtz"};
      s.statement = "the unit's sum differs from IEEE FP32 addition (a1*b1 + a2*b2) + c in a rounding mode";
      break;
    case PropertyId::accum_order:
      s.variables = pair_vars(3, false, false);
      s.candidates = names({"left-rtz", "right-rtz", "tensor"});
      s.compared = {"left-rtz", "right-rtz"};
      s.statement = "(p1 + p2) + p3 differs from p1 + (p2 + p3) under FP32 round-toward-zero";
      break;
    case PropertyId::normalization:
      s.variables = pair_vars(2, true, true);
      s.candidates = names({"ieee-rtz", "ieee-rne", "tensor"});
      s.compared = {"ieee-rtz", "tensor"};
      s.statement = "normalized FP32 chain (p1 + p2) + c differs from the non-normalizing sum; all inputs positive";
      break;
    case PropertyId::carry_bits: {
      s.variables = pair_vars(cfg.k_products, false, true);
      const int w = cfg.carry_bits;
      for (int x : {w - 1, w, w + 1}) {
        if (x >= 0 && x <= 16) s.candidates.push_back("w" + std::to_string(x));
      }
      s.compared = {"w" + std::to_string(std::max(w - 1, 0)), "w" + std::to_string(std::max(w, 1))};
      s.statement = "the sum of all products and c differs between two carry-field widths";
      s.default_exponent_range = {0, 0};
      break;
    }
    case PropertyId::guard_bits:
      s.variables = pair_vars(2, false, true);
      s.candidates = names({"g0", "g1", "g2"});
      s.compared = {"g0", "g1"};
      s.statement = "the sum differs between two guard-bit counts";
      break;
    case PropertyId::markidis_vs_ootomo:
      s.variables = pair_vars(cfg.k_products, false, true);
      for (auto& v : s.variables) {
        v.type = VarType::f32;
        v.product_scale = false;
      }
      s.candidates = names({"markidis", "ootomo", "oracle"});
      s.compared = {"markidis", "ootomo"};
      s.statement = "Markidis is strictly closer than Ootomo-Yokota to the FP32-rounded exact result";
      s.default_exponent_range = {-15, 14};
      break;
  }
  return s;
}

// Everything the per-trial evaluation needs, resolved once.
struct Probe {
  PropertyId prop;
  AccumulatorConfig cfg;
  Schema schema;
  std::vector<Candidate> candidates;  // standard, then the pair if not standard
  std::size_t first = 0;
  std::size_t second = 0;

  Probe(PropertyId p, const ProbeContext& ctx) : prop(p), cfg(ctx.config) {
    validate(cfg);
    cfg.out_precision = OutputPrecision::f32;
    schema = base_schema(p, cfg);
    if (ctx.compare) schema.compared = *ctx.compare;
    for (const auto& n : schema.candidates) candidates.push_back(*resolve_candidate(p, n));
    first = index_of(schema.compared.first);
    second = index_of(schema.compared.second);
    if (first == second) throw std::invalid_argument("compared candidates must differ");
  }

  std::size_t index_of(const std::string& name) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (candidates[i].name == name) return i;
    }
    const auto c = resolve_candidate(prop, name);
    if (!c) {
      std::string known;
      for (const auto& s : schema.candidates) known += (known.empty() ? "" : ", ") + s;
      throw std::invalid_argument("unknown candidate '" + name + "' for " + std::string(to_string(prop)) +
                                  " (known: " + known + ")");
    }
    candidates.push_back(*c);
    return candidates.size() - 1;
  }

  static F16Bits h(Values v, std::size_t i) { return F16Bits{static_cast<std::uint16_t>(v[i])}; }
  static F32Bits f(Values v, std::size_t i) { return F32Bits{v[i]}; }
  F32Bits product(Values v, std::size_t pair) const { return mul_f16_exact(h(v, 2 * pair), h(v, 2 * pair + 1)); }

  // Products of `count` interleaved (a, b) pairs plus an addend, zero-padded to k.
  F32Bits tensor(Values v, std::size_t count, F32Bits c, const AccumulatorConfig& dc) const {
    std::array<F16Bits, 64> a{};
    std::array<F16Bits, 64> b{};
    for (std::size_t i = 0; i < count; ++i) {
      a[i] = h(v, 2 * i);
      b[i] = h(v, 2 * i + 1);
    }
    const auto k = static_cast<std::size_t>(dc.k_products);
    return widen(tensor_dot(std::span(a).first(k), std::span(b).first(k), c, dc));
  }

  MixedScalar tensor_f16(Values v, std::size_t count) const {
    AccumulatorConfig dc = cfg;
    dc.out_precision = OutputPrecision::f16;
    dc.fp16_final_rounding = RoundingMode::rne;
    std::array<F16Bits, 64> a{};
    std::array<F16Bits, 64> b{};
    for (std::size_t i = 0; i < count; ++i) {
      a[i] = h(v, 2 * i);
      b[i] = h(v, 2 * i + 1);
    }
    const auto k = static_cast<std::size_t>(dc.k_products);
    return tensor_dot(std::span(a).first(k), std::span(b).first(k), F32Bits::zero(), dc);
  }

  // FP16 a*b + c*d with each operation rounded to nearest in FP16.
  static F16Bits fp16_chain(Values v) {
    const F16Bits p = f32_to_f16(mul_f16_exact(h(v, 0), h(v, 1)), RoundingMode::rne);
    const F16Bits q = f32_to_f16(mul_f16_exact(h(v, 2), h(v, 3)), RoundingMode::rne);
    if (!p.is_finite() || !q.is_finite()) {
      const F32Bits s = add_f32_ieee(f16_to_f32_exact(p), f16_to_f32_exact(q), RoundingMode::rne);
      return f32_to_f16(s, RoundingMode::rne);
    }
    // The exact sum of two FP16 values fits in 53 bits.
    const double s = static_cast<double>(to_float(f16_to_f32_exact(p))) + to_float(f16_to_f32_exact(q));
    if (s == 0) return F16Bits::zero(p.sign() && q.sign());
    const Unpacked u = decode(from_double(s));
    return round_pack<Binary16>(u.negative, u.significand, u.exponent, RoundingMode::rne).value;
  }

  F32Bits fp32_chain(Values v) const {
    return add_f32_ieee(mul_f16_exact(h(v, 0), h(v, 1)), mul_f16_exact(h(v, 2), h(v, 3)), RoundingMode::rtz);
  }

  std::size_t pair_count() const {
    switch (prop) {
      case PropertyId::exact_mul:
      case PropertyId::final_rounding: return 1;
      case PropertyId::accum_precision:
      case PropertyId::accum_rounding:
      case PropertyId::normalization:
      case PropertyId::guard_bits: return 2;
      case PropertyId::accum_order: return 3;
      case PropertyId::carry_bits:
      case PropertyId::markidis_vs_ootomo: return static_cast<std::size_t>(cfg.k_products);
    }
    return 0;
  }

  bool has_c() const { return schema.variables.back().name == "c"; }

  void split_f32(Values v, std::vector<F32Bits>& a, std::vector<F32Bits>& b, F32Bits& c) const {
    const std::size_t k = pair_count();
    a.resize(k);
    b.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      a[i] = f(v, 2 * i);
      b[i] = f(v, 2 * i + 1);
    }
    c = f(v, 2 * k);
  }

  MixedScalar eval(const Candidate& cand, Values v) const {
    const auto rm = static_cast<RoundingMode>(cand.param);
    switch (cand.kind) {
      case CandKind::exact: return product(v, 0);
      case CandKind::f16_round: return f32_to_f16(product(v, 0), rm);
      case CandKind::ieee_chain: {
        const F32Bits s = add_f32_ieee(product(v, 0), product(v, 1), rm);
        return add_f32_ieee(s, f(v, 4), rm);
      }
      case CandKind::tensor:
        switch (prop) {
          case PropertyId::accum_precision: {
            // a*b + c*d as a two-product dot with FP16 output
            AccumulatorConfig dc = cfg;
            dc.out_precision = OutputPrecision::f16;
            std::array<F16Bits, 64> a{};
            std::array<F16Bits, 64> b{};
            a[0] = h(v, 0);
            b[0] = h(v, 1);
            a[1] = h(v, 2);
            b[1] = h(v, 3);
            const auto k = static_cast<std::size_t>(dc.k_products);
            return tensor_dot(std::span(a).first(k), std::span(b).first(k), F32Bits::zero(), dc);
          }
          case PropertyId::final_rounding: return tensor_f16(v, 1);
          case PropertyId::accum_order: return tensor(v, 3, F32Bits::zero(), cfg);
          default: return tensor(v, 2, f(v, 4), cfg);
        }
      case CandKind::fp16_chain: return fp16_chain(v);
      case CandKind::fp32_chain: return fp32_chain(v);
      case CandKind::left_rtz:
        return add_f32_ieee(add_f32_ieee(product(v, 0), product(v, 1), RoundingMode::rtz), product(v, 2),
                            RoundingMode::rtz);
      case CandKind::right_rtz:
        return add_f32_ieee(product(v, 0), add_f32_ieee(product(v, 1), product(v, 2), RoundingMode::rtz),
                            RoundingMode::rtz);
      case CandKind::carry:
      case CandKind::guard: {
        AccumulatorConfig dc = cfg;
        (cand.kind == CandKind::carry ? dc.carry_bits : dc.guard_bits) = cand.param;
        if (dc.sum_field_width() > 62) throw std::invalid_argument("datapath wider than 62 bits");
        return tensor(v, pair_count(), f(v, 2 * pair_count()), dc);
      }
      case CandKind::markidis:
      case CandKind::ootomo:
      case CandKind::oracle: {
        std::vector<F32Bits> a;
        std::vector<F32Bits> b;
        F32Bits c;
        split_f32(v, a, b, c);
        if (cand.kind == CandKind::markidis) return markidis_dot(a, b, c, cfg);
        if (cand.kind == CandKind::ootomo) return ootomo_dot(a, b, c, cfg);
        return round_exact<Binary32>(exact_dot_f32(a, b, c), RoundingMode::rne);
      }
    }
    return F32Bits::canonical_nan();
  }

  ExactDyadic oracle(Values v) const {
    switch (prop) {
      case PropertyId::exact_mul:
      case PropertyId::final_rounding: return to_exact(h(v, 0)) * to_exact(h(v, 1));
      case PropertyId::accum_precision:
        return to_exact(h(v, 0)) * to_exact(h(v, 1)) + to_exact(h(v, 2)) * to_exact(h(v, 3));
      case PropertyId::markidis_vs_ootomo: {
        std::vector<F32Bits> a;
        std::vector<F32Bits> b;
        F32Bits c;
        split_f32(v, a, b, c);
        return exact_dot_f32(a, b, c);
      }
      default: {
        ExactDyadic s;
        for (std::size_t i = 0; i < pair_count(); ++i) s = s + to_exact(h(v, 2 * i)) * to_exact(h(v, 2 * i + 1));
        if (has_c()) s = s + to_exact(f(v, 2 * pair_count()));
        return s;
      }
    }
  }

  bool side(Values v) const {
    switch (prop) {
      case PropertyId::accum_precision: {
        const F32Bits p = product(v, 0);
        const F32Bits q = product(v, 1);
        const F32Bits s = fp32_chain(v);
        // products inexact in FP16 but within its range, so the witness is about precision
        const auto in_range = [](F32Bits x) { return f32_to_f16(x, RoundingMode::rne).is_finite(); };
        return p.is_finite() && q.is_finite() && !representable_in_f16(p) && !representable_in_f16(q) &&
               in_range(p) && in_range(q) && s.is_finite() && representable_in_f16(s);
      }
      case PropertyId::normalization:
        for (std::size_t i = 0; i < v.size(); ++i) {
          const bool neg = schema.variables[i].type == VarType::f16 ? h(v, i).sign() : f(v, i).sign();
          const bool pos = schema.variables[i].type == VarType::f16 ? (h(v, i).is_finite() && !h(v, i).is_zero())
                                                                     : (f(v, i).is_finite() && !f(v, i).is_zero());
          if (neg || !pos) return false;
        }
        return true;
      default: return true;
    }
  }

  static std::uint32_t widened_bits(const MixedScalar& x) { return widen(x).bits; }

  bool markidis_better(F32Bits m, F32Bits oy, Values v) const {
    if (m == oy) return false;
    const ExactDyadic ref = to_exact(round_exact<Binary32>(oracle(v), RoundingMode::rne));
    return (to_exact(m) - ref).abs() < (to_exact(oy) - ref).abs();
  }

  bool verdict_from(const std::vector<MixedScalar>& out, Values v) const {
    if (!side(v)) return false;
    switch (prop) {
      case PropertyId::exact_mul: {
        const std::uint32_t exact = widened_bits(out[index_named("exact")]);
        for (const Candidate& c : candidates) {
          if (c.kind == CandKind::f16_round && widened_bits(out[&c - candidates.data()]) == exact) return false;
        }
        return true;
      }
      case PropertyId::markidis_vs_ootomo:
        return markidis_better(widen(out[index_named("markidis")]), widen(out[index_named("ootomo")]), v);
      default: return widened_bits(out[first]) != widened_bits(out[second]);
    }
  }

  std::size_t index_named(std::string_view name) const {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (candidates[i].name == name) return i;
    }
    throw std::logic_error("candidate missing");
  }

  // Hot path: only what the verdict needs.
  bool hit(Values v) const {
    if (!side(v)) return false;
    switch (prop) {
      case PropertyId::exact_mul: {
        const F32Bits p = product(v, 0);
        for (const RoundingMode rm : kAllRoundingModes) {
          if (f16_to_f32_exact(f32_to_f16(p, rm)) == p) return false;
        }
        return true;
      }
      case PropertyId::markidis_vs_ootomo: {
        std::vector<F32Bits> a;
        std::vector<F32Bits> b;
        F32Bits c;
        split_f32(v, a, b, c);
        return markidis_better(markidis_dot(a, b, c, cfg), ootomo_dot(a, b, c, cfg), v);
      }
      default:
        return widened_bits(eval(candidates[first], v)) != widened_bits(eval(candidates[second], v));
    }
  }

  Witness witness(Values v, std::uint64_t trial) const {
    Witness w;
    w.property = prop;
    w.trial = trial;
    w.compared = schema.compared;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Variable& var = schema.variables[i];
      w.inputs.push_back({var.name, var.type == VarType::f16 ? MixedScalar{h(v, i)} : MixedScalar{f(v, i)}});
    }
    std::vector<MixedScalar> out;
    for (const Candidate& c : candidates) {
      out.push_back(eval(c, v));
      w.outputs.push_back({c.name, out.back()});
    }
    w.oracle = oracle(v);
    w.side_condition = side(v);
    w.discriminates = verdict_from(out, v);
    return w;
  }
};

// Counter-based generator: the stream for a trial depends only on (seed, trial).
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial) : state_(seed ^ (trial * 0xD1B54A32D192ED03ull)) { next(); }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

std::pair<int, int> effective_range(const SearchConfig& cfg, const Schema& s) {
  const auto r = cfg.exponent_range.value_or(s.default_exponent_range);
  if (r.first > r.second) throw std::invalid_argument("exponent range is empty");
  const bool f32_only = std::all_of(s.variables.begin(), s.variables.end(),
                                    [](const Variable& v) { return v.type == VarType::f32; });
  const int lo_min = f32_only ? -126 : -15;
  const int hi_max = f32_only ? 127 : 15;
  if (r.first < lo_min || r.second > hi_max) {
    throw std::invalid_argument("exponent range must lie within [" + std::to_string(lo_min) + ", " +
                                std::to_string(hi_max) + "]");
  }
  return r;
}

std::uint32_t sample(TrialRng& rng, const Variable& var, std::pair<int, int> range) {
  const bool neg = !var.positive && (rng.next() & 1);
  if (!var.positive && rng.below(32) == 0) return neg ? (var.type == VarType::f16 ? 0x8000u : 0x80000000u) : 0u;
  if (var.type == VarType::f16) {
    const int e = range.first + static_cast<int>(rng.below(static_cast<std::uint64_t>(range.second - range.first + 1)));
    std::uint32_t frac = static_cast<std::uint32_t>(rng.next()) & 0x3FFu;
    std::uint32_t biased = static_cast<std::uint32_t>(e + 15);
    if (e <= -15) {
      biased = 0;
      if (frac == 0) frac = 1;
    }
    return (neg ? 0x8000u : 0u) | (biased << 10) | frac;
  }
  int lo = range.first;
  int hi = range.second;
  if (var.product_scale) {
    lo = std::max(2 * lo, -126);
    hi = std::min(2 * hi + 1, 127);
  }
  const int e = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  const std::uint32_t frac = static_cast<std::uint32_t>(rng.next()) & F32Bits::fraction_mask;
  return (neg ? 0x80000000u : 0u) | (static_cast<std::uint32_t>(e + 127) << 23) | frac;
}

std::uint32_t raw_of(const MixedScalar& x) {
  return std::holds_alternative<F16Bits>(x) ? std::get<F16Bits>(x).bits : std::get<F32Bits>(x).bits;
}

// Pinned values by variable index; throws on unknown names or types.
std::vector<std::optional<std::uint32_t>> resolve_pins(const Schema& s, std::span<const NamedValue> pins) {
  std::vector<std::optional<std::uint32_t>> out(s.variables.size());
  for (const NamedValue& p : pins) {
    auto it = std::find_if(s.variables.begin(), s.variables.end(), [&](const Variable& v) { return v.name == p.name; });
    if (it == s.variables.end()) {
      throw std::invalid_argument("no variable '" + p.name + "' in " + std::string(to_string(s.property)));
    }
    const bool is16 = std::holds_alternative<F16Bits>(p.value);
    if (is16 != (it->type == VarType::f16)) {
      throw std::invalid_argument("variable '" + p.name + "' is " + (it->type == VarType::f16 ? "f16" : "f32"));
    }
    out[static_cast<std::size_t>(it - s.variables.begin())] = raw_of(p.value);
  }
  return out;
}

void fill_random(const Probe& probe, std::pair<int, int> range, const std::vector<std::optional<std::uint32_t>>& pins,
                 std::uint64_t seed, std::uint64_t trial, std::span<std::uint32_t> out) {
  TrialRng rng(seed, trial);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint32_t v = sample(rng, probe.schema.variables[i], range);
    out[i] = pins[i].value_or(v);
  }
}

struct Domains {
  std::vector<std::vector<std::uint32_t>> values;  // per variable
  std::uint64_t size = 1;                           // saturating product
};

Domains exhaustive_domains(const Schema& s, std::optional<std::pair<int, int>> range,
                           const std::vector<std::optional<std::uint32_t>>& pins) {
  Domains d;
  for (std::size_t i = 0; i < s.variables.size(); ++i) {
    std::vector<std::uint32_t> dom;
    if (pins[i]) {
      dom.push_back(*pins[i]);
    } else {
      // FP32 variables range over widened FP16 values.
      for (const F16Bits x : f16_domain(range, s.variables[i].positive)) {
        dom.push_back(s.variables[i].type == VarType::f16 ? x.bits : f16_to_f32_exact(x).bits);
      }
    }
    if (dom.empty()) throw std::invalid_argument("empty domain for variable '" + s.variables[i].name + "'");
    const std::uint64_t n = dom.size();
    d.size = d.size > UINT64_MAX / n ? UINT64_MAX : d.size * n;
    d.values.push_back(std::move(dom));
  }
  return d;
}

// Mixed radix with the first variable most significant.
void fill_exhaustive(const Domains& d, std::uint64_t index, std::span<std::uint32_t> out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    const std::uint64_t n = d.values[i].size();
    out[i] = d.values[i][index % n];
    index /= n;
  }
}

}  // namespace

const MixedScalar& Witness::output(std::string_view name) const {
  for (const auto& o : outputs) {
    if (o.name == name) return o.value;
  }
  throw std::out_of_range("no output named '" + std::string(name) + "'");
}

const MixedScalar& Witness::input(std::string_view name) const {
  for (const auto& i : inputs) {
    if (i.name == name) return i.value;
  }
  throw std::out_of_range("no input named '" + std::string(name) + "'");
}

Schema schema_for(PropertyId prop, const ProbeContext& ctx) {
  const Probe probe(prop, ctx);
  Schema s = probe.schema;
  return s;
}

Witness check_witness(PropertyId prop, std::span<const NamedValue> assignment, const ProbeContext& ctx) {
  const Probe probe(prop, ctx);
  const auto pins = resolve_pins(probe.schema, assignment);
  std::vector<std::uint32_t> v(pins.size());
  for (std::size_t i = 0; i < pins.size(); ++i) {
    if (!pins[i]) throw std::invalid_argument("missing value for '" + probe.schema.variables[i].name + "'");
    v[i] = *pins[i];
  }
  if (assignment.size() != pins.size()) throw std::invalid_argument("assignment names a variable twice");
  return probe.witness(v, 0);
}

std::vector<NamedValue> parse_assignment(PropertyId prop, std::string_view text, const ProbeContext& ctx) {
  const Schema s = schema_for(prop, ctx);
  std::vector<NamedValue> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(start, end - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected name=value, got '" + std::string(item) + "'");
    std::string name(item.substr(0, eq));
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    const auto it =
        std::find_if(s.variables.begin(), s.variables.end(), [&](const Variable& v) { return v.name == name; });
    if (it == s.variables.end()) {
      throw ParseError("no variable '" + name + "' in " + std::string(to_string(prop)));
    }
    const std::string_view lit = item.substr(eq + 1);
    if (it->type == VarType::f16) {
      out.push_back({name, parse_float<Binary16>(lit)});
    } else {
      out.push_back({name, parse_float<Binary32>(lit)});
    }
    start = end + 1;
  }
  return out;
}

std::vector<F16Bits> f16_domain(std::optional<std::pair<int, int>> exponent_range, bool positive_only) {
  const auto [lo, hi] = exponent_range.value_or(std::pair{-15, 15});
  std::vector<F16Bits> out;
  for (const std::uint32_t sign : {0u, 0x8000u}) {
    if (sign && positive_only) break;
    for (std::uint32_t mag = 0; mag < 0x7C00; ++mag) {
      const F16Bits x{static_cast<std::uint16_t>(sign | mag)};
      if (x.is_zero()) {
        if (!positive_only) out.push_back(x);
        continue;
      }
      const int e = x.biased_exponent() == 0 ? -15 : static_cast<int>(x.biased_exponent()) - 15;
      if (e >= lo && e <= hi) out.push_back(x);
    }
  }
  return out;
}

std::vector<NamedValue> random_assignment(PropertyId prop, const SearchConfig& cfg, const ProbeContext& ctx,
                                          std::uint64_t trial) {
  const Probe probe(prop, ctx);
  const auto pins = resolve_pins(probe.schema, cfg.pins);
  std::vector<std::uint32_t> v(probe.schema.variables.size());
  fill_random(probe, effective_range(cfg, probe.schema), pins, cfg.seed, trial, v);
  return probe.witness(v, trial).inputs;
}

SearchResult search(PropertyId prop, const SearchConfig& cfg, const ProbeContext& ctx) {
  const Probe probe(prop, ctx);
  SearchResult result;
  result.property = prop;
  result.schema = probe.schema;
  if (cfg.limit == 0) return result;
  const auto pins = resolve_pins(probe.schema, cfg.pins);
  const std::size_t nvars = probe.schema.variables.size();

  std::pair<int, int> range{};
  Domains domains;
  std::uint64_t total = cfg.trials;
  if (cfg.mode == SearchMode::random) {
    range = effective_range(cfg, probe.schema);
  } else {
    domains = exhaustive_domains(probe.schema, cfg.exponent_range, pins);
    result.domain_size = domains.size;
    total = std::min(total, domains.size);
  }
  auto fill = [&](std::uint64_t index, std::span<std::uint32_t> out) {
    if (cfg.mode == SearchMode::random) {
      fill_random(probe, range, pins, cfg.seed, index, out);
    } else {
      fill_exhaustive(domains, index, out);
    }
  };

  constexpr std::uint64_t kChunk = 1u << 14;
  const unsigned threads = std::max(1u, cfg.threads ? cfg.threads : std::thread::hardware_concurrency());
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits;
  std::uint64_t done = 0;
  for (std::uint64_t wave = 0; wave < chunks && hits.size() < cfg.limit; wave += threads) {
    const std::uint64_t wave_chunks = std::min<std::uint64_t>(threads, chunks - wave);
    std::vector<std::vector<std::uint64_t>> found(wave_chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
      std::vector<std::uint32_t> v(nvars);
      try {
        for (std::uint64_t c = next++; c < wave_chunks; c = next++) {
          const std::uint64_t begin = (wave + c) * kChunk;
          const std::uint64_t end = std::min(total, begin + kChunk);
          for (std::uint64_t i = begin; i < end && found[c].size() < cfg.limit; ++i) {
            fill(i, v);
            if (probe.hit(v)) found[c].push_back(i);
          }
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::min<std::uint64_t>(threads, wave_chunks); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    for (const auto& f : found) hits.insert(hits.end(), f.begin(), f.end());
    done = std::min(total, (wave + wave_chunks) * kChunk);
  }
  if (hits.size() >= cfg.limit) {
    hits.resize(cfg.limit);
    result.trials_run = hits.back() + 1;
  } else {
    result.trials_run = done;
  }
  std::vector<std::uint32_t> v(nvars);
  for (const std::uint64_t i : hits) {
    fill(i, v);
    result.witnesses.push_back(probe.witness(v, i));
  }
  return result;
}

namespace {

std::string value_line(const MixedScalar& x) {
  return format_hex(x) + " " + format_pow2(x) + " (" + format_decimal(x) + ")";
}

}  // namespace

std::string format_witness_text(const Witness& w) {
  std::ostringstream os;
  os << "witness " << to_string(w.property) << " trial " << w.trial << '\n';
  for (const auto& in : w.inputs) os << "  input  " << in.name << " = " << value_line(in.value) << '\n';
  for (const auto& out : w.outputs) os << "  output " << out.name << " = " << value_line(out.value) << '\n';
  os << "  oracle " << format_pow2(w.oracle) << '\n';
  os << "  compare " << w.compared.first << ':' << w.compared.second
     << " side-condition " << (w.side_condition ? "yes" : "no") << " discriminates "
     << (w.discriminates ? "yes" : "no") << '\n';
  return os.str();
}

std::string format_witness_record(const Witness& w) {
  nlohmann::ordered_json j;
  j["property"] = to_string(w.property);
  j["trial"] = w.trial;
  nlohmann::ordered_json in = nlohmann::ordered_json::object();
  for (const auto& i : w.inputs) in[i.name] = format_hex(i.value);
  j["inputs"] = in;
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& o : w.outputs) {
    out[o.name] = {{"hex", format_hex(o.value)}, {"value", format_pow2(o.value)}, {"decimal", format_decimal(o.value)}};
  }
  j["outputs"] = out;
  j["oracle"] = format_pow2(w.oracle);
  j["compared"] = {w.compared.first, w.compared.second};
  j["side_condition"] = w.side_condition;
  j["discriminates"] = w.discriminates;
  return j.dump();
}

std::string format_search_text(const SearchResult& r) {
  std::ostringstream os;
  os << "property " << to_string(r.property) << ": " << r.schema.statement << '\n';
  os << "compare " << r.schema.compared.first << ':' << r.schema.compared.second << '\n';
  os << "trials " << r.trials_run << '\n';
  if (!r.found()) {
    os << "none found within budget\n";
    return os.str();
  }
  os << "witnesses " << r.witnesses.size() << '\n';
  for (const auto& w : r.witnesses) os << format_witness_text(w);
  return os.str();
}

std::string format_search_records(const SearchResult& r) {
  std::string s;
  for (const auto& w : r.witnesses) s += format_witness_record(w) + "\n";
  nlohmann::ordered_json j;
  j["summary"] = {{"property", to_string(r.property)},
                  {"compared", {r.schema.compared.first, r.schema.compared.second}},
                  {"trials", r.trials_run},
                  {"witnesses", r.witnesses.size()},
                  {"found", r.found()}};
  s += j.dump() + "\n";
  return s;
}

}  // namespace tcsem
