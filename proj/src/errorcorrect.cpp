#include "tcsem/errorcorrect.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "tcsem/numeric_text.hpp"

namespace tcsem {

ResidualPair split_residual(F32Bits x, int scale_log2) {
  if (x.is_nan()) throw std::invalid_argument("split_residual: NaN input");
  ResidualPair p;
  p.scale_log2 = scale_log2;
  p.head = f32_to_f16(x, RoundingMode::rne);
  if (p.head.is_inf()) {
    p.head_overflow = true;
    p.residual = F16Bits::canonical_nan();
    return p;
  }
  // |x - head| is at most half an FP16 ulp, so the FP32 difference is exact.
  const F32Bits diff = add_f32_ieee(x, f16_to_f32_exact(p.head).negated(), RoundingMode::rne);
  p.residual = f32_to_f16(scale_pow2(diff, scale_log2).value, RoundingMode::rne);
  return p;
}

SplitVector split_vector(std::span<const F32Bits> x, int scale_log2) {
  SplitVector v;
  for (const F32Bits e : x) {
    const ResidualPair p = split_residual(e, scale_log2);
    v.head.push_back(p.head);
    v.residual.push_back(p.residual);
    v.head_overflow = v.head_overflow || p.head_overflow;
  }
  return v;
}

namespace {

AccumulatorConfig f32_out(AccumulatorConfig cfg) {
  cfg.out_precision = OutputPrecision::f32;
  validate(cfg);
  return cfg;
}

void check_sizes(std::span<const F32Bits> a, std::span<const F32Bits> b, const AccumulatorConfig& cfg) {
  const auto k = static_cast<std::size_t>(cfg.k_products);
  if (a.size() != k || b.size() != k) {
    throw std::invalid_argument("expected " + std::to_string(k) + "-element vectors, got " + std::to_string(a.size()) +
                                " and " + std::to_string(b.size()));
  }
}

F32Bits add_rne(F32Bits x, F32Bits y) { return add_f32_ieee(x, y, RoundingMode::rne); }

}  // namespace

MarkidisRun markidis_dot_traced(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c,
                                const AccumulatorConfig& cfg_in, const MarkidisOrder& order) {
  const AccumulatorConfig cfg = f32_out(cfg_in);
  check_sizes(a, b, cfg);
  const SplitVector sa = split_vector(a, kMarkidisScale);
  const SplitVector sb = split_vector(b, kMarkidisScale);
  MarkidisRun run;
  F32Bits acc = c;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const bool head_a = order[i] == PartialTerm::hr || order[i] == PartialTerm::hh;
    const bool head_b = order[i] == PartialTerm::rh || order[i] == PartialTerm::hh;
    run.steps[i] = tensor_dot_traced(head_a ? sa.head : sa.residual, head_b ? sb.head : sb.residual, acc, cfg);
    acc = widen(run.steps[i].result);
  }
  run.value = acc;
  return run;
}

F32Bits markidis_dot(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c, const AccumulatorConfig& cfg,
                     const MarkidisOrder& order) {
  return markidis_dot_traced(a, b, c, cfg, order).value;
}

OotomoRun ootomo_dot_traced(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c,
                            const AccumulatorConfig& cfg_in) {
  const AccumulatorConfig cfg = f32_out(cfg_in);
  check_sizes(a, b, cfg);
  const SplitVector sa = split_vector(a, kOotomoScale);
  const SplitVector sb = split_vector(b, kOotomoScale);
  OotomoRun run;
  const F32Bits zero = F32Bits::zero();
  run.rr = tensor_dot_traced(sa.residual, sb.residual, zero, cfg);
  run.rh = tensor_dot_traced(sa.residual, sb.head, zero, cfg);
  run.hr = tensor_dot_traced(sa.head, sb.residual, run.rh.result, cfg);
  run.hh = tensor_dot_traced(sa.head, sb.head, zero, cfg);
  const F32Bits t1 = scale_pow2(widen(run.rr.result), -2 * kOotomoScale).value;
  const F32Bits t2 = scale_pow2(widen(run.hr.result), -kOotomoScale).value;
  run.outside_1 = add_rne(t1, t2);
  run.outside_2 = add_rne(run.outside_1, widen(run.hh.result));
  run.value = add_rne(run.outside_2, c);
  return run;
}

F32Bits ootomo_dot(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c, const AccumulatorConfig& cfg) {
  return ootomo_dot_traced(a, b, c, cfg).value;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::markidis_better: return "markidis-better";
    case Verdict::ootomo_better: return "ootomo-better";
    case Verdict::tie: return "tie";
  }
  return "?";
}

ExactDyadic exact_dot_f32(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c) {
  if (a.size() != b.size()) throw std::invalid_argument("exact_dot_f32: vector lengths differ");
  ExactDyadic s = to_exact(c);
  for (std::size_t i = 0; i < a.size(); ++i) s = s + to_exact(a[i]) * to_exact(b[i]);
  return s;
}

F32Bits binary64_dot(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c) {
  if (a.size() != b.size()) throw std::invalid_argument("binary64_dot: vector lengths differ");
  // FP32 x FP32 products need 48 bits, so each product is exact in binary64.
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(to_float(a[i])) * static_cast<double>(to_float(b[i]));
  }
  acc += static_cast<double>(to_float(c));
  return round_exact<Binary32>(to_exact(from_double(acc)), RoundingMode::rne);
}

ErrorReport compare_error(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c,
                          const AccumulatorConfig& cfg, OracleMode mode) {
  ErrorReport r;
  r.a.assign(a.begin(), a.end());
  r.b.assign(b.begin(), b.end());
  r.c = c;
  r.mode = mode;
  r.markidis_run = markidis_dot_traced(a, b, c, cfg);
  r.ootomo_run = ootomo_dot_traced(a, b, c, cfg);
  r.markidis = r.markidis_run.value;
  r.ootomo = r.ootomo_run.value;
  r.exact = exact_dot_f32(a, b, c);
  r.oracle = mode == OracleMode::exact ? round_exact<Binary32>(r.exact, RoundingMode::rne) : binary64_dot(a, b, c);
  const ExactDyadic ref = to_exact(r.oracle);
  r.markidis_error = (to_exact(r.markidis) - ref).abs();
  r.ootomo_error = (to_exact(r.ootomo) - ref).abs();
  r.markidis_error_exact = (to_exact(r.markidis) - r.exact).abs();
  r.ootomo_error_exact = (to_exact(r.ootomo) - r.exact).abs();
  if (r.markidis_error < r.ootomo_error) {
    r.verdict = Verdict::markidis_better;
  } else if (r.ootomo_error < r.markidis_error) {
    r.verdict = Verdict::ootomo_better;
  } else {
    r.verdict = Verdict::tie;  // includes unordered (NaN) errors
  }
  return r;
}

std::vector<CompareInstance> random_instances(std::uint64_t seed, std::size_t count, int k, int exp_lo, int exp_hi) {
  if (exp_lo > exp_hi || exp_lo < -126 || exp_hi > 127) throw std::invalid_argument("bad exponent range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> exp_dist(exp_lo, exp_hi);
  auto draw = [&] {
    const auto sign = static_cast<std::uint32_t>(rng() & 1) << 31;
    const auto exp = static_cast<std::uint32_t>(exp_dist(rng) + Binary32::bias) << 23;
    const auto frac = static_cast<std::uint32_t>(rng()) & F32Bits::fraction_mask;
    return F32Bits{sign | exp | frac};
  };
  std::vector<CompareInstance> out(count);
  for (auto& inst : out) {
    for (int i = 0; i < k; ++i) inst.a.push_back(draw());
    for (int i = 0; i < k; ++i) inst.b.push_back(draw());
    inst.c = draw();
  }
  return out;
}

CompareSummary summarize(std::span<const ErrorReport> reports) {
  CompareSummary s;
  for (const ErrorReport& r : reports) {
    ++s.instances;
    switch (r.verdict) {
      case Verdict::markidis_better: ++s.markidis_better; break;
      case Verdict::ootomo_better: ++s.ootomo_better; break;
      case Verdict::tie: ++s.ties; break;
    }
    const bool m0 = r.markidis_error.is_zero();
    const bool o0 = r.ootomo_error.is_zero();
    s.markidis_exact += m0 ? 1 : 0;
    s.ootomo_exact += o0 ? 1 : 0;
    if (!m0 && r.markidis_error.is_finite() && r.ootomo_error.is_finite()) {
      s.max_ootomo_over_markidis =
          std::max(s.max_ootomo_over_markidis, r.ootomo_error.to_double() / r.markidis_error.to_double());
    }
    if (!o0 && r.markidis_error.is_finite() && r.ootomo_error.is_finite()) {
      s.max_markidis_over_ootomo =
          std::max(s.max_markidis_over_ootomo, r.markidis_error.to_double() / r.ootomo_error.to_double());
    }
  }
  return s;
}

namespace {

std::string join_hex(std::span<const F32Bits> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_hex(v[i]);
  return s;
}

nlohmann::json hex_array(std::span<const F32Bits> v) {
  nlohmann::json j = nlohmann::json::array();
  for (const F32Bits x : v) j.push_back(format_hex(x));
  return j;
}

}  // namespace

std::string format_report_text(const ErrorReport& r) {
  std::ostringstream os;
  os << "a        " << join_hex(r.a) << '\n';
  os << "b        " << join_hex(r.b) << '\n';
  os << "c        " << format_hex(r.c) << ' ' << format_pow2(r.c) << '\n';
  os << "exact    " << format_pow2(r.exact) << '\n';
  os << "oracle   " << format_hex(r.oracle) << ' ' << format_pow2(r.oracle)
     << (r.mode == OracleMode::exact ? " (exact, rounded to f32)" : " (binary64, rounded to f32)") << '\n';
  os << "markidis " << format_hex(r.markidis) << ' ' << format_pow2(r.markidis) << " error "
     << format_pow2(r.markidis_error) << '\n';
  os << "ootomo   " << format_hex(r.ootomo) << ' ' << format_pow2(r.ootomo) << " error " << format_pow2(r.ootomo_error)
     << '\n';
  os << "verdict  " << to_string(r.verdict) << '\n';
  return os.str();
}

std::string format_report_record(const ErrorReport& r) {
  nlohmann::ordered_json j;
  j["a"] = hex_array(r.a);
  j["b"] = hex_array(r.b);
  j["c"] = format_hex(r.c);
  j["oracle_mode"] = r.mode == OracleMode::exact ? "exact" : "binary64";
  j["exact"] = format_pow2(r.exact);
  j["oracle"] = format_hex(r.oracle);
  j["markidis"] = format_hex(r.markidis);
  j["ootomo"] = format_hex(r.ootomo);
  j["markidis_error"] = format_pow2(r.markidis_error);
  j["ootomo_error"] = format_pow2(r.ootomo_error);
  j["markidis_error_exact"] = format_pow2(r.markidis_error_exact);
  j["ootomo_error_exact"] = format_pow2(r.ootomo_error_exact);
  j["verdict"] = to_string(r.verdict);
  return j.dump();
}

std::string format_summary_text(const CompareSummary& s) {
  std::ostringstream os;
  os << "instances        " << s.instances << '\n';
  os << "markidis-better  " << s.markidis_better << '\n';
  os << "ootomo-better    " << s.ootomo_better << '\n';
  os << "tie              " << s.ties << '\n';
  os << "markidis-exact   " << s.markidis_exact << '\n';
  os << "ootomo-exact     " << s.ootomo_exact << '\n';
  os << "max ootomo/markidis error ratio " << s.max_ootomo_over_markidis << '\n';
  os << "max markidis/ootomo error ratio " << s.max_markidis_over_ootomo << '\n';
  return os.str();
}

std::string format_summary_record(const CompareSummary& s) {
  nlohmann::ordered_json j;
  j["summary"] = {{"instances", s.instances},
                  {"markidis_better", s.markidis_better},
                  {"ootomo_better", s.ootomo_better},
                  {"tie", s.ties},
                  {"markidis_exact", s.markidis_exact},
                  {"ootomo_exact", s.ootomo_exact},
                  {"max_ootomo_over_markidis", s.max_ootomo_over_markidis},
                  {"max_markidis_over_ootomo", s.max_markidis_over_ootomo}};
  return j.dump();
}

}  // namespace tcsem
