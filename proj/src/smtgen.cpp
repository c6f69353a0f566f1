#include "tcsem/smtgen.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tcsem {

namespace {

std::string num(long long v) { return std::to_string(v); }
std::string bvc(long long v, int width) { return "(_ bv" + num(v) + " " + num(width) + ")"; }
std::string ext(int hi, int lo, const std::string& x) {
  return "((_ extract " + num(hi) + " " + num(lo) + ") " + x + ")";
}
std::string zext(int n, const std::string& x) { return "((_ zero_extend " + num(n) + ") " + x + ")"; }
std::string bvsort(int width) { return "(_ BitVec " + num(width) + ")"; }

std::string rm_atom(RoundingMode rm) {
  switch (rm) {
    case RoundingMode::rne: return "RNE";
    case RoundingMode::rtz: return "RTZ";
    case RoundingMode::rtn: return "RTN";
    case RoundingMode::rtp: return "RTP";
  }
  return "RNE";
}

// Position of the leading one of an n-bit value as a 16-bit number (0 for zero).
std::string lead_definition(int n) {
  std::ostringstream os;
  os << "(define-fun lead-" << n << " ((m " << bvsort(n) << ")) (_ BitVec 16)\n";
  for (int i = n - 1; i >= 1; --i) {
    os << "  (ite (= " << ext(i, i, "m") << " #b1) " << bvc(i, 16) << "\n";
  }
  os << "  " << bvc(0, 16) << std::string(static_cast<std::size_t>(n), ')');
  return os.str();
}

std::string config_tag(const AccumulatorConfig& cfg) {
  return "g" + num(cfg.guard_bits) + "-w" + num(cfg.carry_bits);
}

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += sep;
    s += xs[i];
  }
  return s;
}

// Nested binary application: (f x0 (f x1 (... xn)))
std::string fold(const std::string& f, const std::vector<std::string>& xs) {
  std::string s = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) s = "(" + f + " " + xs[i] + " " + s + ")";
  return s;
}

}  // namespace

void SmtDocument::define(const std::string& name, std::string text) {
  if (!name.empty() && defines(name)) return;
  definitions.emplace_back(name, std::move(text));
}

void SmtDocument::merge_definitions(const SmtDocument& fragment) {
  for (const auto& [name, text] : fragment.definitions) define(name, text);
}

bool SmtDocument::defines(std::string_view name) const {
  return std::any_of(definitions.begin(), definitions.end(), [&](const auto& d) { return d.first == name; });
}

std::string SmtDocument::render() const {
  std::ostringstream os;
  if (!logic.empty()) {
    os << "(set-logic " << logic << ")\n";
    os << "(set-info :smt-lib-version 2.6)\n";
  }
  for (const auto& h : header) os << (h.empty() ? ";" : "; " + h) << "\n";
  if (!declarations.empty()) {
    os << "\n";
    for (const auto& d : declarations) os << d << "\n";
  }
  if (!definitions.empty()) {
    os << "\n";
    for (const auto& [name, text] : definitions) os << text << "\n";
  }
  if (!assertions.empty()) {
    os << "\n";
    for (const auto& a : assertions) os << a << "\n";
  }
  if (!commands.empty()) {
    os << "\n";
    for (const auto& c : commands) os << c << "\n";
  }
  return os.str();
}

SmtDocument emit_model_helpers() {
  SmtDocument d;
  d.define("#term-fields", "; FP32 term fields; zero terms get exponent 0 so they never set the maximum");
  d.define("term-nan", "(define-fun term-nan ((x (_ BitVec 32))) Bool\n  (and (= " + ext(30, 23, "x") +
                           " #xff) (not (= " + ext(22, 0, "x") + " " + bvc(0, 23) + "))))");
  d.define("term-pinf", "(define-fun term-pinf ((x (_ BitVec 32))) Bool (= x #x7f800000))");
  d.define("term-ninf", "(define-fun term-ninf ((x (_ BitVec 32))) Bool (= x #xff800000))");
  d.define("term-neg", "(define-fun term-neg ((x (_ BitVec 32))) Bool (= " + ext(31, 31, "x") + " #b1))");
  d.define("term-exp", "(define-fun term-exp ((x (_ BitVec 32))) (_ BitVec 8)\n  (ite (= " + ext(30, 0, "x") + " " +
                           bvc(0, 31) + ") #x00 (ite (= " + ext(30, 23, "x") + " #x00) #x01 " + ext(30, 23, "x") +
                           ")))");
  d.define("term-sig", "(define-fun term-sig ((x (_ BitVec 32))) (_ BitVec 24)\n  (concat (ite (= " +
                           ext(30, 23, "x") + " #x00) #b0 #b1) " + ext(22, 0, "x") + "))");
  d.define("exp-max", "(define-fun exp-max ((x (_ BitVec 8)) (y (_ BitVec 8))) (_ BitVec 8) (ite (bvuge x y) x y))");

  d.define("#fp16-product", "; exact FP16 x FP16 product as an FP32 bit pattern (22-bit significand product, never rounded)");
  d.define("half-nan", "(define-fun half-nan ((x (_ BitVec 16))) Bool\n  (and (= " + ext(14, 10, "x") +
                           " #b11111) (not (= " + ext(9, 0, "x") + " " + bvc(0, 10) + "))))");
  d.define("half-inf", "(define-fun half-inf ((x (_ BitVec 16))) Bool\n  (and (= " + ext(14, 10, "x") +
                           " #b11111) (= " + ext(9, 0, "x") + " " + bvc(0, 10) + ")))");
  d.define("half-zero", "(define-fun half-zero ((x (_ BitVec 16))) Bool (= " + ext(14, 0, "x") + " " + bvc(0, 15) + "))");
  d.define("half-sig", "(define-fun half-sig ((x (_ BitVec 16))) (_ BitVec 22)\n  (concat " + bvc(0, 11) +
                           " (ite (= " + ext(14, 10, "x") + " #b00000) #b0 #b1) " + ext(9, 0, "x") + "))");
  d.define("half-exp", "(define-fun half-exp ((x (_ BitVec 16))) (_ BitVec 16)\n  (concat " + bvc(0, 11) +
                           " (ite (= " + ext(14, 10, "x") + " #b00000) #b00001 " + ext(14, 10, "x") + ")))");
  d.define("lead-22", lead_definition(22));
  d.define("fp16-mul-bits",
           "(define-fun fp16-mul-bits ((x (_ BitVec 16)) (y (_ BitVec 16))) (_ BitVec 32)\n"
           "  (let ((s (bvxor " + ext(15, 15, "x") + " " + ext(15, 15, "y") + "))\n"
           "        (p (bvmul (half-sig x) (half-sig y))))\n"
           "  (let ((lead (lead-22 p)))\n"
           "  (ite (or (half-nan x) (half-nan y) (and (half-inf x) (half-zero y)) (and (half-zero x) (half-inf y)))\n"
           "    #x7fc00000\n"
           "  (ite (or (half-inf x) (half-inf y)) (concat s #xff " + bvc(0, 23) + ")\n"
           "  (ite (= p " + bvc(0, 22) + ") (concat s " + bvc(0, 31) + ")\n"
           "  (concat s\n"
           "    " + ext(7, 0, "(bvadd (half-exp x) (half-exp y) lead " + bvc(77, 16) + ")") + "\n"
           "    " + ext(22, 0, "(bvshl " + zext(2, "p") + " " + zext(8, "(bvsub " + bvc(23, 16) + " lead)") + ")") +
           ")))))))");
  return d;
}

SmtDocument emit_accumulator_definition(const AccumulatorConfig& cfg, std::string_view suffix_in) {
  validate(cfg);
  const std::string suffix(suffix_in);
  const int g = cfg.guard_bits;
  const int w = cfg.carry_bits;
  const int k = cfg.k_products;
  const int n = cfg.sum_field_width();
  const int mag = cfg.significand_width();
  const std::string tag = config_tag(cfg);

  SmtDocument d = emit_model_helpers();
  d.define("#accumulator-" + tag, "; accumulator k=" + num(k) + " guard=" + num(g) + " carry=" + num(w) + ": magnitude width " + num(mag) +
                   " bits (24 significand, " + num(g) + " guard, " + num(w) + " carry), " + num(n) +
                   "-bit two's-complement sum field");
  d.define("lead-" + num(n), lead_definition(n));

  std::string padded = "(concat " + bvc(0, w + 1) + " (term-sig x)" + (g > 0 ? " " + bvc(0, g) : "") + ")";
  d.define("align-" + tag, "; shift each significand right to the largest exponent; shifted-out bits are lost\n"
                           "(define-fun align-" + tag + " ((x (_ BitVec 32)) (e (_ BitVec 8))) " + bvsort(n) + "\n"
                           "  (let ((m (bvlshr " + padded + " " + zext(n - 8, "(bvsub e (term-exp x))") + ")))\n"
                           "  (ite (term-neg x) (bvneg m) m)))");

  const std::string shift_right = "(bvlshr m " + zext(n - 16, "(bvsub lead " + bvc(23, 16) + ")") + ")";
  const std::string shift_left = "(bvshl m " + zext(n - 16, "(bvsub " + bvc(23, 16) + " lead)") + ")";
  const std::string sub_left = "(bvshl m " + zext(n - 8, "(bvsub e " + bvc(1 + g, 8) + ")") + ")";
  const std::string sub_right = "(bvlshr m " + zext(n - 8, "(bvsub " + bvc(1 + g, 8) + " e)") + ")";
  d.define("normalize-" + tag,
           "; one normalization of the raw sum, truncating to 24 significant bits (or onto the 2^-149 grid)\n"
           "(define-fun normalize-" + tag + " ((s " + bvsort(n) + ") (e (_ BitVec 8))) (_ BitVec 32)\n"
           "  (let ((neg (= " + ext(n - 1, n - 1, "s") + " #b1)))\n"
           "  (let ((m (ite neg (bvneg s) s)))\n"
           "  (let ((lead (lead-" + num(n) + " m)) (sgn (ite neg #b1 #b0)))\n"
           "  (let ((re (bvsub (bvadd " + zext(8, "e") + " lead) " + bvc(23 + g, 16) + ")))\n"
           "  (ite (= m " + bvc(0, n) + ") #x00000000\n"
           "  (ite (bvsge re " + bvc(255, 16) + ") (concat sgn #xff " + bvc(0, 23) + ")\n"
           "  (ite (bvsge re " + bvc(1, 16) + ")\n"
           "    (concat sgn " + ext(7, 0, "re") + " " +
               ext(22, 0, "(ite (bvugt lead " + bvc(23, 16) + ") " + shift_right + " " + shift_left + ")") + ")\n"
           "    (concat sgn #x00 " +
               ext(22, 0, "(ite (bvuge e " + bvc(1 + g, 8) + ") " + sub_left + " " + sub_right + ")") + ")))))))))");

  std::vector<std::string> params;
  std::vector<std::string> terms;
  for (int i = 1; i <= k; ++i) terms.push_back("p" + num(i));
  terms.push_back("c");
  for (const auto& t : terms) params.push_back("(" + t + " (_ BitVec 32))");
  std::vector<std::string> exps;
  std::vector<std::string> nans;
  std::vector<std::string> pinfs;
  std::vector<std::string> ninfs;
  std::vector<std::string> aligned;
  for (const auto& t : terms) {
    exps.push_back("(term-exp " + t + ")");
    nans.push_back("(term-nan " + t + ")");
    pinfs.push_back("(term-pinf " + t + ")");
    ninfs.push_back("(term-ninf " + t + ")");
    aligned.push_back("(align-" + tag + " " + t + " e)");
  }
  const std::string pinf = "(or " + join(pinfs, " ") + ")";
  const std::string ninf = "(or " + join(ninfs, " ") + ")";
  d.define("no-normalize-sum" + suffix,
           "; sum of k products and c without normalizing intermediate results\n"
           "(define-fun no-normalize-sum" + suffix + " (" + join(params, " ") + ") (_ BitVec 32)\n"
           "  (let ((e " + fold("exp-max", exps) + "))\n"
           "  (ite (or " + join(nans, " ") + "\n"
           "          (and " + pinf + "\n"
           "               " + ninf + "))\n"
           "    #x7fc00000\n"
           "  (ite " + pinf + " #x7f800000\n"
           "  (ite " + ninf + " #xff800000\n"
           "  (normalize-" + tag + " (bvadd " + join(aligned, " ") + ") e))))))");

  std::vector<std::string> dot_params;
  std::vector<std::string> products;
  for (int i = 1; i <= k; ++i) {
    dot_params.push_back("(x" + num(i) + " (_ BitVec 16)) (y" + num(i) + " (_ BitVec 16))");
    products.push_back("(fp16-mul-bits x" + num(i) + " y" + num(i) + ")");
  }
  dot_params.push_back("(z (_ BitVec 32))");
  d.define("tensor-dot" + suffix, "(define-fun tensor-dot" + suffix + " (" + join(dot_params, " ") +
                                      ") (_ BitVec 32)\n  (no-normalize-sum" + suffix + " " + join(products, " ") +
                                      " z))");
  return d;
}

namespace {

class PropertyEmitter {
 public:
  PropertyEmitter(PropertyId prop, const ProbeContext& ctx, std::string_view label)
      : prop_(prop), ctx_(ctx), cfg_(ctx.config), schema_(schema_for(prop, ctx)) {
    cfg_.out_precision = OutputPrecision::f32;
    doc_.logic = "QF_BVFP";
    doc_.header = {
        "property " + std::string(to_string(prop)) + ": " + schema_.statement,
        "configuration " + std::string(label) + ": " + describe(cfg_),
        "accumulator magnitude width " + num(cfg_.significand_width()) + " bits (24 significand, " +
            num(cfg_.guard_bits) + " guard, " + num(cfg_.carry_bits) + " carry), sum field " +
            num(cfg_.sum_field_width()) + " bits",
    };
  }

  SmtDocument build() {
    inputs();
    switch (prop_) {
      case PropertyId::exact_mul: exact_mul(); break;
      case PropertyId::accum_precision: accum_precision(); break;
      case PropertyId::final_rounding: final_rounding(); break;
      case PropertyId::accum_rounding: accum_rounding(); break;
      case PropertyId::accum_order: accum_order(); break;
      case PropertyId::normalization: normalization(); break;
      case PropertyId::carry_bits:
      case PropertyId::guard_bits: datapath_pair(); break;
      case PropertyId::markidis_vs_ootomo: markidis_vs_ootomo(); break;
    }
    doc_.header.push_back("a model reads back as name=0xHEX pairs for `tcsem search --property " +
                          std::string(to_string(prop_)) + " --check ...`; cvc5 needs --produce-models");
    return std::move(doc_);
  }

 private:
  static std::string w32(const std::string& x) { return "((_ to_fp 8 24) RNE " + x + ")"; }

  void inputs() {
    std::vector<std::string> h16;
    std::vector<std::string> h32;
    for (const Variable& v : schema_.variables) {
      const bool is16 = v.type == VarType::f16;
      (is16 ? h16 : h32).push_back(v.name);
      doc_.declarations.push_back("(declare-const " + v.name + " " + bvsort(is16 ? 16 : 32) + ")");
    }
    std::string line = "inputs are raw bit patterns:";
    if (!h16.empty()) line += " " + join(h16, " ") + " binary16";
    if (!h16.empty() && !h32.empty()) line += ";";
    if (!h32.empty()) line += " " + join(h32, " ") + " binary32";
    doc_.header.push_back(line);
    doc_.define("", "; floating-point views of the inputs");
    for (const Variable& v : schema_.variables) {
      const bool is16 = v.type == VarType::f16;
      doc_.define(v.name + "-fp", "(define-fun " + v.name + "-fp () " + (is16 ? "Float16" : "Float32") +
                                      (is16 ? " ((_ to_fp 5 11) " : " ((_ to_fp 8 24) ") + v.name + "))");
    }
  }

  void require_k(int pairs) const {
    if (cfg_.k_products < pairs) {
      throw std::invalid_argument(std::string(to_string(prop_)) + " needs k >= " + num(pairs) + ", got k=" +
                                  num(cfg_.k_products));
    }
  }

  void model(const AccumulatorConfig& cfg, const std::string& suffix) {
    doc_.merge_definitions(emit_accumulator_definition(cfg, suffix));
  }

  // tensor-dot over the given (a, b) names, zero-padded to k, with addend z.
  std::string tensor_call(const std::string& suffix, const std::vector<std::pair<std::string, std::string>>& pairs,
                          const std::string& z) const {
    std::string s = "(tensor-dot" + suffix;
    for (int i = 0; i < cfg_.k_products; ++i) {
      if (static_cast<std::size_t>(i) < pairs.size()) {
        s += " " + pairs[static_cast<std::size_t>(i)].first + " " + pairs[static_cast<std::size_t>(i)].second;
      } else {
        s += " #x0000 #x0000";
      }
    }
    return s + " " + z + ")";
  }

  std::vector<std::pair<std::string, std::string>> pairs(int count) const {
    std::vector<std::pair<std::string, std::string>> p;
    for (int i = 1; i <= count; ++i) p.emplace_back("a" + num(i), "b" + num(i));
    return p;
  }

  std::string product(const std::string& a, const std::string& b, const std::string& name) {
    doc_.define(name, "(define-fun " + name + " () Float32 (fp.mul RNE " + w32(a + "-fp") + " " + w32(b + "-fp") + "))");
    return name;
  }

  void candidate(const std::string& name, const std::string& sort, const std::string& expr) {
    if (sorts_.empty()) doc_.define("", "; candidate models");
    sorts_[name] = sort;
    doc_.define("out-" + name, "(define-fun out-" + name + " () " + sort + "\n  " + expr + ")");
  }

  std::string as32(const std::string& name) const {
    const std::string ref = "out-" + name;
    return sorts_.at(name) == "Float16" ? w32(ref) : ref;
  }

  std::string differ(const std::string& x, const std::string& y) const {
    if (sorts_.at(x) == sorts_.at(y)) return "(not (= out-" + x + " out-" + y + "))";
    return "(not (= " + as32(x) + " " + as32(y) + "))";
  }

  void discriminate(const std::string& x, const std::string& y) {
    doc_.header.push_back("discriminating condition: " + x + " differs from " + y);
    doc_.assertions.push_back("; discriminating condition");
    doc_.assertions.push_back("(assert " + differ(x, y) + ")");
    doc_.commands = {"(check-sat)", "(get-model)"};
  }

  void default_pair() { discriminate(schema_.compared.first, schema_.compared.second); }

  void exact_mul() {
    const std::string p = product("a", "b", "prod");
    doc_.header.push_back("the FP32 product of FP16 operands is exact in every rounding mode, so one exact product serves all four");
    candidate("exact", "Float32", p);
    for (const RoundingMode rm : kAllRoundingModes) {
      candidate("f16-" + std::string(to_string(rm)), "Float16", "(fp.mul " + rm_atom(rm) + " a-fp b-fp)");
    }
    if (ctx_.compare) return default_pair();
    doc_.header.push_back("discriminating condition: the FP16 product differs from the exact product in every mode");
    doc_.assertions.push_back("; discriminating condition, one assertion per rounding mode");
    for (const RoundingMode rm : kAllRoundingModes) {
      doc_.assertions.push_back("(assert (not (= ((_ to_fp 8 24) RTZ out-f16-" + std::string(to_string(rm)) +
                                ") out-exact)))");
    }
    doc_.commands = {"(check-sat)", "(get-model)"};
  }

  void finite_in_f16(const std::string& x, bool inside) {
    doc_.assertions.push_back("(assert (not (or (fp.isNaN " + x + ") (fp.isInfinite " + x + "))))");
    const std::string in = "(in-f16 " + x + ")";
    doc_.assertions.push_back("(assert " + (inside ? in : "(not " + in + ")") + ")");
    if (!inside) doc_.assertions.push_back("(assert (not (fp.isInfinite ((_ to_fp 5 11) RNE " + x + "))))");
  }

  void accum_precision() {
    require_k(2);
    model(cfg_, "");
    const std::string p = product("a", "b", "prod1");
    const std::string q = product("c", "d", "prod2");
    candidate("fp16-chain", "Float16", "(fp.add RNE (fp.mul RNE a-fp b-fp) (fp.mul RNE c-fp d-fp))");
    candidate("fp32-chain", "Float32", "(fp.add RTZ " + p + " " + q + ")");
    candidate("tensor", "Float16",
              "((_ to_fp 5 11) " + rm_atom(cfg_.fp16_final_rounding) + " ((_ to_fp 8 24) " +
                  tensor_call("", {{"a", "b"}, {"c", "d"}}, "#x00000000") + "))");
    doc_.define("in-f16", "(define-fun in-f16 ((x Float32)) Bool (= " + w32("((_ to_fp 5 11) RNE x)") + " x))");
    doc_.assertions.push_back("; side conditions: both products inexact in FP16 but within its range, their FP32 sum inside FP16");
    finite_in_f16(p, false);
    finite_in_f16(q, false);
    finite_in_f16("out-fp32-chain", true);
    default_pair();
  }

  void final_rounding() {
    require_k(1);
    model(cfg_, "");
    const std::string p = product("a", "b", "prod");
    for (const RoundingMode rm : kAllRoundingModes) {
      candidate(std::string(to_string(rm)), "Float16", "((_ to_fp 5 11) " + rm_atom(rm) + " " + p + ")");
    }
    candidate("tensor", "Float16",
              "((_ to_fp 5 11) RNE ((_ to_fp 8 24) " + tensor_call("", {{"a", "b"}}, "#x00000000") + "))");
    if (ctx_.compare) return default_pair();
    doc_.header.push_back("one push/pop block per pair of rounding modes");
    for (std::size_t i = 0; i < std::size(kAllRoundingModes); ++i) {
      for (std::size_t j = i + 1; j < std::size(kAllRoundingModes); ++j) {
        const std::string x(to_string(kAllRoundingModes[i]));
        const std::string y(to_string(kAllRoundingModes[j]));
        doc_.commands.push_back("; " + x + " vs " + y);
        doc_.commands.push_back("(push 1)");
        doc_.commands.push_back("(assert " + differ(x, y) + ")");
        doc_.commands.push_back("(check-sat)");
        doc_.commands.push_back("(get-model)");
        doc_.commands.push_back("(pop 1)");
      }
    }
  }

  void accum_rounding() {
    require_k(2);
    model(cfg_, "");
    const std::string p = product("a1", "b1", "prod1");
    const std::string q = product("a2", "b2", "prod2");
    candidate("tensor", "Float32", "((_ to_fp 8 24) " + tensor_call("", pairs(2), "c") + ")");
    for (const RoundingMode rm : kAllRoundingModes) {
      const std::string m = rm_atom(rm);
      candidate(std::string(to_string(rm)), "Float32", "(fp.add " + m + " (fp.add " + m + " " + p + " " + q + ") c-fp)");
    }
    default_pair();
  }

  void accum_order() {
    require_k(3);
    model(cfg_, "");
    const std::string p1 = product("a1", "b1", "prod1");
    const std::string p2 = product("a2", "b2", "prod2");
    const std::string p3 = product("a3", "b3", "prod3");
    candidate("left-rtz", "Float32", "(fp.add RTZ (fp.add RTZ " + p1 + " " + p2 + ") " + p3 + ")");
    candidate("right-rtz", "Float32", "(fp.add RTZ " + p1 + " (fp.add RTZ " + p2 + " " + p3 + "))");
    candidate("tensor", "Float32", "((_ to_fp 8 24) " + tensor_call("", pairs(3), "#x00000000") + ")");
    default_pair();
  }

  void normalization() {
    require_k(2);
    model(cfg_, "");
    const std::string p = product("a1", "b1", "prod1");
    const std::string q = product("a2", "b2", "prod2");
    candidate("ieee-rtz", "Float32", "(fp.add RTZ (fp.add RTZ " + p + " " + q + ") c-fp)");
    candidate("ieee-rne", "Float32", "(fp.add RNE (fp.add RNE " + p + " " + q + ") c-fp)");
    candidate("tensor", "Float32", "((_ to_fp 8 24) " + tensor_call("", pairs(2), "c") + ")");
    doc_.assertions.push_back("; side condition: every input is positive and finite");
    for (const Variable& v : schema_.variables) {
      const std::string x = v.name + "-fp";
      doc_.assertions.push_back("(assert (and (fp.isPositive " + x + ") (not (fp.isZero " + x + ")) (not (fp.isInfinite " +
                                x + "))))");
    }
    default_pair();
  }

  // carry-bits / guard-bits: two datapath widths over the same inputs.
  void datapath_pair() {
    const bool carry = prop_ == PropertyId::carry_bits;
    for (const std::string& name : {schema_.compared.first, schema_.compared.second}) {
      AccumulatorConfig c = cfg_;
      (carry ? c.carry_bits : c.guard_bits) = std::stoi(name.substr(1));
      const bool same = c.carry_bits == cfg_.carry_bits && c.guard_bits == cfg_.guard_bits;
      const std::string suffix = same ? "" : "-" + name;
      model(c, suffix);
      const int count = static_cast<int>(schema_.variables.size() / 2);
      candidate(name, "Float32", "((_ to_fp 8 24) " + tensor_call(suffix, pairs(count), "c") + ")");
    }
    default_pair();
  }

  void markidis_vs_ootomo() {
    model(cfg_, "");
    const int k = cfg_.k_products;
    doc_.define("Wide", "; wide enough that every sum and difference below is exact under the range constraint\n"
                        "(define-sort Wide () (_ FloatingPoint 15 256))");
    doc_.define("two-pow-11", "(define-fun two-pow-11 () Float32 ((_ to_fp 8 24) #x45000000))");
    doc_.define("two-pow-m11", "(define-fun two-pow-m11 () Float32 ((_ to_fp 8 24) #x3a000000))");
    doc_.define("two-pow-m22", "(define-fun two-pow-m22 () Float32 ((_ to_fp 8 24) #x34800000))");
    doc_.header.push_back("auxiliary constants x-head, x-res0, x-res11 hold the FP16 split of each input x;");
    doc_.header.push_back("they are fixed by the inputs, so models stay in one-to-one correspondence");

    std::vector<std::string> ops;
    for (int i = 1; i <= k; ++i) {
      ops.push_back("a" + num(i));
      ops.push_back("b" + num(i));
    }
    doc_.assertions.push_back("; range constraint: every input is zero or has magnitude in [2^-15, 2^15)");
    for (const Variable& v : schema_.variables) {
      const std::string x = v.name + "-fp";
      doc_.assertions.push_back("(assert (or (fp.isZero " + x + ") (and (fp.leq ((_ to_fp 8 24) #x38000000) (fp.abs " +
                                x + ")) (fp.lt (fp.abs " + x + ") ((_ to_fp 8 24) #x47000000)))))");
    }
    doc_.assertions.push_back("; head = RN16(x), residual = RN16((x - head) * 2^s) for s = 0 and s = 11");
    for (const std::string& x : ops) {
      for (const char* part : {"-head", "-res0", "-res11"}) {
        doc_.declarations.push_back("(declare-const " + x + part + " (_ BitVec 16))");
      }
      const std::string head32 = w32("((_ to_fp 5 11) " + x + "-head)");
      const std::string diff = "(fp.sub RNE " + x + "-fp " + head32 + ")";
      doc_.assertions.push_back("(assert (= ((_ to_fp 5 11) " + x + "-head) ((_ to_fp 5 11) RNE " + x + "-fp)))");
      doc_.assertions.push_back("(assert (= ((_ to_fp 5 11) " + x + "-res0) ((_ to_fp 5 11) RNE " + diff + ")))");
      doc_.assertions.push_back("(assert (= ((_ to_fp 5 11) " + x + "-res11) ((_ to_fp 5 11) RNE (fp.mul RNE " + diff +
                                " two-pow-11))))");
    }

    auto split = [&](const std::string& a_part, const std::string& b_part) {
      std::vector<std::pair<std::string, std::string>> p;
      for (int i = 1; i <= k; ++i) p.emplace_back("a" + num(i) + a_part, "b" + num(i) + b_part);
      return p;
    };
    doc_.define("", "; Markidis: c accumulated through rr, hr, rh, hh on the unit");
    doc_.define("mk-rr", "(define-fun mk-rr () (_ BitVec 32) " + tensor_call("", split("-res0", "-res0"), "c") + ")");
    doc_.define("mk-hr", "(define-fun mk-hr () (_ BitVec 32) " + tensor_call("", split("-head", "-res0"), "mk-rr") + ")");
    doc_.define("mk-rh", "(define-fun mk-rh () (_ BitVec 32) " + tensor_call("", split("-res0", "-head"), "mk-hr") + ")");
    doc_.define("mk-hh", "(define-fun mk-hh () (_ BitVec 32) " + tensor_call("", split("-head", "-head"), "mk-rh") + ")");
    doc_.define("", "; Ootomo-Yokota: scaled residual terms, then RN additions outside the unit");
    doc_.define("oy-rr", "(define-fun oy-rr () (_ BitVec 32) " + tensor_call("", split("-res11", "-res11"), "#x00000000") + ")");
    doc_.define("oy-rh", "(define-fun oy-rh () (_ BitVec 32) " + tensor_call("", split("-res11", "-head"), "#x00000000") + ")");
    doc_.define("oy-hr", "(define-fun oy-hr () (_ BitVec 32) " + tensor_call("", split("-head", "-res11"), "oy-rh") + ")");
    doc_.define("oy-hh", "(define-fun oy-hh () (_ BitVec 32) " + tensor_call("", split("-head", "-head"), "#x00000000") + ")");
    doc_.define("oy-sum",
                "(define-fun oy-sum () Float32\n"
                "  (fp.add RNE (fp.add RNE (fp.add RNE (fp.mul RNE ((_ to_fp 8 24) oy-rr) two-pow-m22)\n"
                "                                      (fp.mul RNE ((_ to_fp 8 24) oy-hr) two-pow-m11))\n"
                "                          ((_ to_fp 8 24) oy-hh))\n"
                "              c-fp))");

    // FP32 products are exact with a 48-bit significand; forming them there keeps the wide sort to additions
    std::vector<std::string> exact_terms;
    for (int i = 1; i <= k; ++i) {
      exact_terms.push_back("((_ to_fp 15 256) RNE (fp.mul RNE ((_ to_fp 10 48) RNE a" + num(i) +
                            "-fp) ((_ to_fp 10 48) RNE b" + num(i) + "-fp)))");
    }
    exact_terms.push_back("((_ to_fp 15 256) RNE c-fp)");
    std::string sum = exact_terms[0];
    for (std::size_t i = 1; i < exact_terms.size(); ++i) sum = "(fp.add RNE " + sum + "\n    " + exact_terms[i] + ")";
    doc_.define("exact-sum", "(define-fun exact-sum () Wide\n  " + sum + ")");

    candidate("markidis", "Float32", "((_ to_fp 8 24) mk-hh)");
    candidate("ootomo", "Float32", "oy-sum");
    candidate("oracle", "Float32", "((_ to_fp 8 24) RNE exact-sum)");
    doc_.define("wide-error", "(define-fun wide-error ((x Float32)) Wide\n"
                              "  (fp.abs (fp.sub RNE ((_ to_fp 15 256) RNE x) ((_ to_fp 15 256) RNE out-oracle))))");
    if (ctx_.compare) return default_pair();
    doc_.header.push_back("discriminating condition: Markidis is strictly closer than Ootomo-Yokota to the oracle");
    doc_.assertions.push_back("; discriminating condition");
    doc_.assertions.push_back("(assert (fp.lt (wide-error out-markidis) (wide-error out-ootomo)))");
    doc_.commands = {"(check-sat)", "(get-model)"};
  }

  PropertyId prop_;
  ProbeContext ctx_;
  AccumulatorConfig cfg_;
  Schema schema_;
  SmtDocument doc_;
  std::map<std::string, std::string> sorts_;
};

}  // namespace

SmtDocument emit_property(PropertyId prop, const ProbeContext& ctx, std::string_view label) {
  return PropertyEmitter(prop, ctx, label).build();
}

std::string smt_file_name(PropertyId prop, std::string_view label) {
  std::string name(to_string(prop));
  std::replace(name.begin(), name.end(), '-', '_');
  return name + "_" + std::string(label) + ".smt2";
}

}  // namespace tcsem
