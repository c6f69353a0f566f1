#include "tcsem/smt_eval.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include "tcsem/numeric_text.hpp"

namespace tcsem::smt {

namespace mp = boost::multiprecision;

std::string SExpr::to_string() const {
  if (is_atom()) return atom;
  std::string s = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ' ';
    s += items[i].to_string();
  }
  return s + ")";
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    skip();
    while (pos_ < text_.size()) {
      out.push_back(expr());
      skip();
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("smt: line " + std::to_string(line_) + ": " + what);
  }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        return;
      }
    }
  }

  SExpr expr() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == ')') fail("unbalanced ')'");
    if (c == '(') {
      ++pos_;
      SExpr list;
      list.kind = SExpr::Kind::list;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) fail("missing ')'");
        if (text_[pos_] == ')') {
          ++pos_;
          return list;
        }
        list.items.push_back(expr());
      }
    }
    SExpr a;
    if (c == '|') {
      const auto end = text_.find('|', pos_ + 1);
      if (end == std::string_view::npos) fail("unterminated quoted symbol");
      a.atom = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return a;
    }
    if (c == '"') {
      std::string s = "\"";
      ++pos_;
      for (;;) {
        if (pos_ >= text_.size()) fail("unterminated string");
        if (text_[pos_] == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            s += "\"\"";
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        s += text_[pos_++];
      }
      a.atom = s + "\"";
      return a;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || d == ' ' || d == '\t' || d == '\r' || d == '\n' || d == '"' ||
          d == '|') {
        break;
      }
      ++pos_;
    }
    a.atom = std::string(text_.substr(start, pos_ - start));
    return a;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

std::uint64_t mask(int width) { return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1; }

std::int64_t as_signed(const BitVec& v) {
  std::uint64_t b = v.bits;
  if (v.width < 64 && (b >> (v.width - 1)) & 1) b |= ~mask(v.width);
  return static_cast<std::int64_t>(b);
}

[[noreturn]] void type_error(const std::string& what) { throw std::invalid_argument("smt: " + what); }

struct Sort {
  enum class Kind : std::uint8_t { boolean, bitvec, fp, rm };
  Kind kind = Kind::boolean;
  int a = 0;  // bitvec width or eb
  int b = 0;  // sb
};

int to_int(const SExpr& e) {
  int v = 0;
  if (!e.is_atom()) type_error("expected a numeral, got " + e.to_string());
  const auto* end = e.atom.data() + e.atom.size();
  const auto r = std::from_chars(e.atom.data(), end, v);
  if (r.ec != std::errc{} || r.ptr != end) type_error("expected a numeral, got " + e.atom);
  return v;
}

std::int64_t emin_of(int eb) { return 2 - (std::int64_t{1} << (eb - 1)); }
std::int64_t emax_of(int eb) { return (std::int64_t{1} << (eb - 1)) - 1; }

}  // namespace

std::vector<SExpr> parse_script(std::string_view text) { return Reader(text).all(); }

FpValue round_fp(const ExactDyadic& v, int eb, int sb, RoundingMode rm) {
  using Integer = ExactDyadic::Integer;
  FpValue out{eb, sb, v};
  if (!v.is_finite() || v.is_zero()) return out;
  const bool neg = v.negative();
  const std::int64_t emin = emin_of(eb);
  const std::int64_t emax = emax_of(eb);
  const Integer& m = v.mantissa();
  const auto top = static_cast<std::int64_t>(mp::msb(m));
  std::int64_t lsb = std::max(v.exponent() + top - (sb - 1), emin - (sb - 1));
  Integer q;
  bool up = false;
  if (v.exponent() >= lsb) {
    q = m << static_cast<unsigned>(v.exponent() - lsb);
  } else {
    const auto sh = static_cast<unsigned>(lsb - v.exponent());
    q = m >> sh;
    const Integer rem = m - (q << sh);
    if (rem != 0) {
      const Integer half = Integer(1) << (sh - 1);
      switch (rm) {
        case RoundingMode::rne: up = rem > half || (rem == half && (q & 1) != 0); break;
        case RoundingMode::rtz: break;
        case RoundingMode::rtp: up = !neg; break;
        case RoundingMode::rtn: up = neg; break;
      }
    }
  }
  if (up) q += 1;
  if (q == (Integer(1) << sb)) {
    q >>= 1;
    ++lsb;
  }
  if (q == 0) {
    out.value = ExactDyadic::finite(neg, 0, 0);
    return out;
  }
  if (lsb + static_cast<std::int64_t>(mp::msb(q)) > emax) {
    const bool to_inf = rm == RoundingMode::rne || (rm == RoundingMode::rtp && !neg) ||
                        (rm == RoundingMode::rtn && neg);
    out.value = to_inf ? ExactDyadic::infinity(neg)
                       : ExactDyadic::finite(neg, (Integer(1) << sb) - 1, emax - (sb - 1));
    return out;
  }
  out.value = ExactDyadic::finite(neg, q, lsb);
  return out;
}

FpValue fp_from_bits(int eb, int sb, std::uint64_t bits) {
  if (eb < 2 || sb < 2 || eb + sb > 64) type_error("unsupported float format for a bit pattern");
  const bool neg = (bits >> (eb + sb - 1)) & 1;
  const std::uint64_t e = (bits >> (sb - 1)) & mask(eb);
  const std::uint64_t f = bits & mask(sb - 1);
  FpValue v{eb, sb, {}};
  if (e == mask(eb)) {
    v.value = f == 0 ? ExactDyadic::infinity(neg) : ExactDyadic::nan();
  } else if (e == 0) {
    v.value = ExactDyadic::finite(neg, ExactDyadic::Integer(f), emin_of(eb) - (sb - 1));
  } else {
    v.value = ExactDyadic::finite(neg, ExactDyadic::Integer(f | (std::uint64_t{1} << (sb - 1))),
                                  static_cast<std::int64_t>(e) - emax_of(eb) - (sb - 1));
  }
  return v;
}

std::uint64_t fp_to_bits(const FpValue& v) {
  const int eb = v.eb;
  const int sb = v.sb;
  if (eb + sb > 64) type_error("float format too wide for a bit pattern");
  const std::uint64_t exp_ones = mask(eb) << (sb - 1);
  if (v.value.is_nan()) return exp_ones | (std::uint64_t{1} << (sb - 2));
  const std::uint64_t sign = v.value.negative() ? std::uint64_t{1} << (eb + sb - 1) : 0;
  if (!v.value.is_finite()) return sign | exp_ones;
  if (v.value.is_zero()) return sign;
  const auto& m = v.value.mantissa();
  const auto top = static_cast<std::int64_t>(mp::msb(m));
  const std::int64_t e = v.value.exponent() + top;
  const std::int64_t emin = emin_of(eb);
  const std::int64_t lsb = std::max(e, emin) - (sb - 1);
  if (v.value.exponent() < lsb || e > emax_of(eb)) type_error("value not representable in its format");
  const auto sig = (m << static_cast<unsigned>(v.value.exponent() - lsb)).convert_to<std::uint64_t>();
  if (e < emin) return sign | sig;
  return sign | (static_cast<std::uint64_t>(e + emax_of(eb)) << (sb - 1)) | (sig & mask(sb - 1));
}

bool same_value(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<FpValue>(&a)) {
    const auto& y = std::get<FpValue>(b);
    if (x->eb != y.eb || x->sb != y.sb) return false;
    if (x->value.is_nan() || y.value.is_nan()) return x->value.is_nan() && y.value.is_nan();
    return x->value.negative() == y.value.negative() && x->value.kind() == y.value.kind() && x->value == y.value;
  }
  if (const auto* x = std::get_if<BitVec>(&a)) return *x == std::get<BitVec>(b);
  if (const auto* x = std::get_if<bool>(&a)) return *x == std::get<bool>(b);
  return std::get<RoundingMode>(a) == std::get<RoundingMode>(b);
}

namespace {

std::string bin(std::uint64_t bits, int width) {
  std::string s = "#b";
  for (int i = width - 1; i >= 0; --i) s += ((bits >> i) & 1) ? '1' : '0';
  return s;
}

std::string_view rm_name(RoundingMode rm) {
  switch (rm) {
    case RoundingMode::rne: return "RNE";
    case RoundingMode::rtz: return "RTZ";
    case RoundingMode::rtn: return "RTN";
    case RoundingMode::rtp: return "RTP";
  }
  return "?";
}

}  // namespace

std::string format_value(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* x = std::get_if<BitVec>(&v)) {
    if (x->width % 4 != 0) return bin(x->bits, x->width);
    std::ostringstream os;
    os << "#x" << std::hex;
    for (int i = x->width / 4 - 1; i >= 0; --i) os << ((x->bits >> (4 * i)) & 0xF);
    return os.str();
  }
  if (const auto* f = std::get_if<FpValue>(&v)) {
    if (f->eb + f->sb > 64) return f->value.to_string();
    const std::uint64_t bits = fp_to_bits(*f);
    return "(fp " + bin(bits >> (f->eb + f->sb - 1), 1) + " " + bin((bits >> (f->sb - 1)) & mask(f->eb), f->eb) + " " +
           bin(bits & mask(f->sb - 1), f->sb - 1) + ")";
  }
  return std::string(rm_name(std::get<RoundingMode>(v)));
}

struct Interpreter::Impl {
  struct Func {
    std::vector<std::string> params;
    SExpr body;
  };
  std::map<std::string, Func, std::less<>> funcs;
  std::map<std::string, Sort, std::less<>> declared;
  std::map<std::string, SExpr, std::less<>> sort_aliases;
  std::map<std::string, Value, std::less<>> consts;
  std::vector<SExpr> commands;

  using Env = std::vector<std::pair<const std::string*, Value>>;

  Sort sort_of(const SExpr& s) const {
    if (s.is_atom()) {
      if (s.atom == "Bool") return {Sort::Kind::boolean};
      if (s.atom == "RoundingMode") return {Sort::Kind::rm};
      if (s.atom == "Float16") return {Sort::Kind::fp, 5, 11};
      if (s.atom == "Float32") return {Sort::Kind::fp, 8, 24};
      if (s.atom == "Float64") return {Sort::Kind::fp, 11, 53};
      if (s.atom == "Float128") return {Sort::Kind::fp, 15, 113};
      const auto it = sort_aliases.find(s.atom);
      if (it != sort_aliases.end()) return sort_of(it->second);
    } else if (s.items.size() >= 3 && s.items[0].is_atom("_")) {
      if (s.items[1].is_atom("BitVec") && s.items.size() == 3) return {Sort::Kind::bitvec, to_int(s.items[2])};
      if (s.items[1].is_atom("FloatingPoint") && s.items.size() == 4) {
        return {Sort::Kind::fp, to_int(s.items[2]), to_int(s.items[3])};
      }
    }
    type_error("unsupported sort " + s.to_string());
  }

  void load(const SExpr& cmd) {
    if (cmd.is_atom() || cmd.items.empty() || !cmd.items[0].is_atom()) type_error("malformed command");
    const std::string& op = cmd.items[0].atom;
    if (op == "define-fun") {
      if (cmd.items.size() != 5 || !cmd.items[1].is_atom() || cmd.items[2].is_atom()) type_error("malformed define-fun");
      Func f;
      for (const SExpr& p : cmd.items[2].items) {
        if (p.is_atom() || p.items.size() != 2 || !p.items[0].is_atom()) type_error("malformed parameter");
        sort_of(p.items[1]);
        f.params.push_back(p.items[0].atom);
      }
      sort_of(cmd.items[3]);
      f.body = cmd.items[4];
      funcs[cmd.items[1].atom] = std::move(f);
    } else if (op == "declare-const" || op == "declare-fun") {
      const bool fun = op == "declare-fun";
      if (cmd.items.size() != (fun ? 4u : 3u) || !cmd.items[1].is_atom()) type_error("malformed " + op);
      if (fun && (cmd.items[2].is_atom() || !cmd.items[2].items.empty())) type_error("only nullary functions are supported");
      declared[cmd.items[1].atom] = sort_of(cmd.items.back());
    } else if (op == "define-sort") {
      if (cmd.items.size() != 4 || !cmd.items[1].is_atom() || cmd.items[2].is_atom() || !cmd.items[2].items.empty()) {
        type_error("only parameterless define-sort is supported");
      }
      sort_aliases[cmd.items[1].atom] = cmd.items[3];
      sort_of(cmd.items[3]);
    } else if (op == "assert" || op == "push" || op == "pop" || op == "check-sat" || op == "get-model" ||
               op == "get-value" || op == "set-logic" || op == "set-info" || op == "set-option" || op == "exit" ||
               op == "echo") {
      commands.push_back(cmd);
    } else {
      type_error("unsupported command " + op);
    }
  }

  static BitVec bv(const Value& v) {
    if (const auto* x = std::get_if<BitVec>(&v)) return *x;
    type_error("expected a bitvector, got " + format_value(v));
  }
  static bool boolean(const Value& v) {
    if (const auto* x = std::get_if<bool>(&v)) return *x;
    type_error("expected a Bool, got " + format_value(v));
  }
  static const FpValue& fp(const Value& v) {
    if (const auto* x = std::get_if<FpValue>(&v)) return *x;
    type_error("expected a float, got " + format_value(v));
  }
  static RoundingMode rm(const Value& v) {
    if (const auto* x = std::get_if<RoundingMode>(&v)) return *x;
    type_error("expected a rounding mode, got " + format_value(v));
  }

  static std::optional<RoundingMode> rm_atom(std::string_view s) {
    if (s == "RNE" || s == "roundNearestTiesToEven") return RoundingMode::rne;
    if (s == "RTZ" || s == "roundTowardZero") return RoundingMode::rtz;
    if (s == "RTP" || s == "roundTowardPositive") return RoundingMode::rtp;
    if (s == "RTN" || s == "roundTowardNegative") return RoundingMode::rtn;
    return std::nullopt;
  }

  Value atom(const SExpr& e, const Env& env) const {
    const std::string& s = e.atom;
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (*it->first == s) return it->second;
    }
    if (s.size() > 2 && s[0] == '#' && (s[1] == 'b' || s[1] == 'x')) {
      const int base = s[1] == 'b' ? 2 : 16;
      const int width = static_cast<int>(s.size() - 2) * (base == 2 ? 1 : 4);
      if (width > 64) type_error("bitvector literal wider than 64 bits: " + s);
      std::uint64_t bits = 0;
      const auto* end = s.data() + s.size();
      const auto r = std::from_chars(s.data() + 2, end, bits, base);
      if (r.ec != std::errc{} || r.ptr != end) type_error("bad literal " + s);
      return BitVec{width, bits};
    }
    if (s == "true") return true;
    if (s == "false") return false;
    if (const auto r = rm_atom(s)) return *r;
    if (const auto f = funcs.find(s); f != funcs.end()) {
      if (!f->second.params.empty()) type_error(s + " needs arguments");
      Env inner;
      return eval(f->second.body, inner);
    }
    if (const auto c = consts.find(s); c != consts.end()) return c->second;
    if (declared.contains(s)) type_error("no value assigned to " + s);
    type_error("unknown symbol " + s);
  }

  static Value fp_add(RoundingMode mode, const FpValue& x, const FpValue& y) {
    if (x.eb != y.eb || x.sb != y.sb) type_error("fp.add on mismatched formats");
    ExactDyadic s = x.value + y.value;
    if (s.is_zero()) {
      const bool keep = x.value.is_zero() && y.value.is_zero() && x.value.negative() == y.value.negative();
      s = ExactDyadic::finite(keep ? x.value.negative() : mode == RoundingMode::rtn, 0, 0);
    }
    return round_fp(s, x.eb, x.sb, mode);
  }

  static Value fp_mul(RoundingMode mode, const FpValue& x, const FpValue& y) {
    if (x.eb != y.eb || x.sb != y.sb) type_error("fp.mul on mismatched formats");
    return round_fp(x.value * y.value, x.eb, x.sb, mode);
  }

  static FpValue fp_neg(const FpValue& x) { return {x.eb, x.sb, -x.value}; }

  Value indexed(const SExpr& head, const std::vector<Value>& args) const {
    const std::string& name = head.items.at(1).atom;
    auto index = [&](std::size_t i) { return to_int(head.items.at(i)); };
    if (name == "extract") {
      const BitVec x = bv(args.at(0));
      const int hi = index(2);
      const int lo = index(3);
      if (hi < lo || hi >= x.width || lo < 0) type_error("extract out of range");
      return BitVec{hi - lo + 1, (x.bits >> lo) & mask(hi - lo + 1)};
    }
    if (name == "zero_extend" || name == "sign_extend") {
      const BitVec x = bv(args.at(0));
      const int n = index(2);
      if (x.width + n > 64) type_error("extension wider than 64 bits");
      std::uint64_t b = x.bits;
      if (name == "sign_extend") b = static_cast<std::uint64_t>(as_signed(x)) & mask(x.width + n);
      return BitVec{x.width + n, b};
    }
    if (name == "to_fp") {
      const int eb = index(2);
      const int sb = index(3);
      if (args.size() == 1) {
        const BitVec x = bv(args[0]);
        if (x.width != eb + sb) type_error("to_fp bit pattern of the wrong width");
        return fp_from_bits(eb, sb, x.bits);
      }
      if (args.size() == 2 && std::holds_alternative<FpValue>(args[1])) {
        return round_fp(fp(args[1]).value, eb, sb, rm(args[0]));
      }
      type_error("unsupported to_fp form");
    }
    type_error("unsupported indexed operator " + name);
  }

  Value literal(const SExpr& e) const {
    const std::string& name = e.items.at(1).atom;
    if (name.size() > 2 && name.starts_with("bv") && e.items.size() == 3) {
      const int width = to_int(e.items[2]);
      if (width < 1 || width > 64) type_error("unsupported width in " + e.to_string());
      std::uint64_t v = 0;
      const auto* end = name.data() + name.size();
      const auto r = std::from_chars(name.data() + 2, end, v);
      if (r.ec != std::errc{} || r.ptr != end) type_error("bad literal " + e.to_string());
      return BitVec{width, v & mask(width)};
    }
    if (e.items.size() == 4) {
      const int eb = to_int(e.items[2]);
      const int sb = to_int(e.items[3]);
      if (name == "+zero" || name == "-zero") return FpValue{eb, sb, ExactDyadic::finite(name[0] == '-', 0, 0)};
      if (name == "+oo" || name == "-oo") return FpValue{eb, sb, ExactDyadic::infinity(name[0] == '-')};
      if (name == "NaN") return FpValue{eb, sb, ExactDyadic::nan()};
    }
    type_error("unsupported literal " + e.to_string());
  }

  Value eval(const SExpr& e, Env& env) const {
    if (e.is_atom()) return atom(e, env);
    if (e.items.empty()) type_error("empty application");
    const SExpr& head = e.items[0];
    if (!head.is_atom()) {
      if (head.items.size() < 3 || !head.items[0].is_atom("_")) type_error("bad operator " + head.to_string());
      std::vector<Value> args;
      for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(eval(e.items[i], env));
      return indexed(head, args);
    }
    const std::string& op = head.atom;
    if (op == "_") return literal(e);
    if (op == "let") {
      if (e.items.size() != 3 || e.items[1].is_atom()) type_error("malformed let");
      std::vector<std::pair<const std::string*, Value>> bound;
      for (const SExpr& b : e.items[1].items) {
        if (b.is_atom() || b.items.size() != 2 || !b.items[0].is_atom()) type_error("malformed let binding");
        bound.emplace_back(&b.items[0].atom, eval(b.items[1], env));
      }
      const std::size_t mark = env.size();
      for (auto& b : bound) env.push_back(std::move(b));
      Value v = eval(e.items[2], env);
      env.resize(mark);
      return v;
    }
    if (op == "ite") {
      if (e.items.size() != 4) type_error("ite needs three arguments");
      return boolean(eval(e.items[1], env)) ? eval(e.items[2], env) : eval(e.items[3], env);
    }
    if (op == "!") return eval(e.items.at(1), env);

    std::vector<Value> args;
    args.reserve(e.items.size() - 1);
    for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(eval(e.items[i], env));
    const std::size_t n = args.size();
    auto need = [&](std::size_t k) {
      if (n != k) type_error(op + " takes " + std::to_string(k) + " arguments");
    };

    // Core
    if (op == "not") {
      need(1);
      return !boolean(args[0]);
    }
    if (op == "and" || op == "or" || op == "xor") {
      bool acc = op == "and";
      for (const Value& a : args) {
        const bool b = boolean(a);
        acc = op == "and" ? (acc && b) : op == "or" ? (acc || b) : (acc != b);
      }
      return acc;
    }
    if (op == "=>") {
      need(2);
      return !boolean(args[0]) || boolean(args[1]);
    }
    if (op == "=") {
      for (std::size_t i = 1; i < n; ++i) {
        if (!same_value(args[0], args[i])) return false;
      }
      return true;
    }
    if (op == "distinct") {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (same_value(args[i], args[j])) return false;
        }
      }
      return true;
    }

    // Bitvectors
    if (op.starts_with("bv")) {
      if (op == "bvnot" || op == "bvneg") {
        need(1);
        const BitVec x = bv(args[0]);
        return BitVec{x.width, (op == "bvnot" ? ~x.bits : 0 - x.bits) & mask(x.width)};
      }
      if (n < 2) type_error(op + " needs two arguments");
      const BitVec x = bv(args[0]);
      for (const Value& a : args) {
        if (bv(a).width != x.width) type_error(op + " on mismatched widths");
      }
      if (op == "bvadd" || op == "bvmul" || op == "bvand" || op == "bvor" || op == "bvxor") {
        std::uint64_t acc = x.bits;
        for (std::size_t i = 1; i < n; ++i) {
          const std::uint64_t y = bv(args[i]).bits;
          if (op == "bvadd") acc += y;
          else if (op == "bvmul") acc *= y;
          else if (op == "bvand") acc &= y;
          else if (op == "bvor") acc |= y;
          else acc ^= y;
        }
        return BitVec{x.width, acc & mask(x.width)};
      }
      need(2);
      const BitVec y = bv(args[1]);
      const int w = x.width;
      if (op == "bvsub") return BitVec{w, (x.bits - y.bits) & mask(w)};
      if (op == "bvshl") return BitVec{w, y.bits >= static_cast<std::uint64_t>(w) ? 0 : (x.bits << y.bits) & mask(w)};
      if (op == "bvlshr") return BitVec{w, y.bits >= static_cast<std::uint64_t>(w) ? 0 : x.bits >> y.bits};
      if (op == "bvashr") {
        const std::int64_t s = as_signed(x);
        const std::uint64_t sh = std::min<std::uint64_t>(y.bits, 63);
        return BitVec{w, static_cast<std::uint64_t>(s >> sh) & mask(w)};
      }
      if (op == "bvult") return x.bits < y.bits;
      if (op == "bvule") return x.bits <= y.bits;
      if (op == "bvugt") return x.bits > y.bits;
      if (op == "bvuge") return x.bits >= y.bits;
      if (op == "bvslt") return as_signed(x) < as_signed(y);
      if (op == "bvsle") return as_signed(x) <= as_signed(y);
      if (op == "bvsgt") return as_signed(x) > as_signed(y);
      if (op == "bvsge") return as_signed(x) >= as_signed(y);
      if (op == "bvudiv") return BitVec{w, y.bits == 0 ? mask(w) : x.bits / y.bits};
      if (op == "bvurem") return BitVec{w, y.bits == 0 ? x.bits : x.bits % y.bits};
      type_error("unsupported operator " + op);
    }
    if (op == "concat") {
      if (n < 2) type_error("concat needs two arguments");
      BitVec acc = bv(args[0]);
      for (std::size_t i = 1; i < n; ++i) {
        const BitVec y = bv(args[i]);
        if (acc.width + y.width > 64) type_error("concat wider than 64 bits");
        acc = BitVec{acc.width + y.width, (acc.bits << y.width) | y.bits};
      }
      return acc;
    }

    // Floating point
    if (op == "fp") {
      need(3);
      const BitVec s = bv(args[0]);
      const BitVec ex = bv(args[1]);
      const BitVec m = bv(args[2]);
      if (s.width != 1) type_error("fp sign must be one bit");
      return fp_from_bits(ex.width, m.width + 1, (s.bits << (ex.width + m.width)) | (ex.bits << m.width) | m.bits);
    }
    if (op.starts_with("fp.")) {
      if (op == "fp.add" || op == "fp.sub" || op == "fp.mul") {
        need(3);
        const RoundingMode mode = rm(args[0]);
        if (op == "fp.mul") return fp_mul(mode, fp(args[1]), fp(args[2]));
        return fp_add(mode, fp(args[1]), op == "fp.sub" ? fp_neg(fp(args[2])) : fp(args[2]));
      }
      if (op == "fp.neg" || op == "fp.abs") {
        need(1);
        const FpValue& x = fp(args[0]);
        if (op == "fp.neg") return fp_neg(x);
        return FpValue{x.eb, x.sb, x.value.is_nan() ? x.value : x.value.abs()};
      }
      if (op == "fp.eq" || op == "fp.lt" || op == "fp.leq" || op == "fp.gt" || op == "fp.geq") {
        if (n < 2) type_error(op + " needs two arguments");
        for (std::size_t i = 0; i + 1 < n; ++i) {
          const auto c = fp(args[i]).value <=> fp(args[i + 1]).value;
          bool ok = false;
          if (op == "fp.eq") ok = c == std::partial_ordering::equivalent;
          else if (op == "fp.lt") ok = c == std::partial_ordering::less;
          else if (op == "fp.leq") ok = c == std::partial_ordering::less || c == std::partial_ordering::equivalent;
          else if (op == "fp.gt") ok = c == std::partial_ordering::greater;
          else ok = c == std::partial_ordering::greater || c == std::partial_ordering::equivalent;
          if (!ok) return false;
        }
        return true;
      }
      need(1);
      const FpValue& x = fp(args[0]);
      const ExactDyadic& v = x.value;
      const bool finite_nonzero = v.is_finite() && !v.is_zero();
      const bool subnormal = finite_nonzero && v.abs() < ExactDyadic::pow2(emin_of(x.eb));
      if (op == "fp.isNaN") return v.is_nan();
      if (op == "fp.isInfinite") return v.kind() == ExactDyadic::Kind::infinite;
      if (op == "fp.isZero") return v.is_zero();
      if (op == "fp.isNormal") return finite_nonzero && !subnormal;
      if (op == "fp.isSubnormal") return subnormal;
      if (op == "fp.isNegative") return !v.is_nan() && v.negative();
      if (op == "fp.isPositive") return !v.is_nan() && !v.negative();
      type_error("unsupported operator " + op);
    }

    const auto f = funcs.find(op);
    if (f == funcs.end()) type_error("unknown function " + op);
    if (f->second.params.size() != n) type_error(op + " called with the wrong number of arguments");
    Env inner;
    inner.reserve(n);
    for (std::size_t i = 0; i < n; ++i) inner.emplace_back(&f->second.params[i], std::move(args[i]));
    return eval(f->second.body, inner);
  }
};

Interpreter::Interpreter() : impl_(std::make_unique<Impl>()) {}
Interpreter::~Interpreter() = default;
Interpreter::Interpreter(Interpreter&&) noexcept = default;
Interpreter& Interpreter::operator=(Interpreter&&) noexcept = default;

void Interpreter::load(std::string_view text) {
  for (const SExpr& cmd : parse_script(text)) impl_->load(cmd);
}

void Interpreter::set_const(const std::string& name, Value v) {
  const auto it = impl_->declared.find(name);
  if (it == impl_->declared.end()) type_error("undeclared constant " + name);
  const Sort& s = it->second;
  bool ok = false;
  switch (s.kind) {
    case Sort::Kind::boolean: ok = std::holds_alternative<bool>(v); break;
    case Sort::Kind::rm: ok = std::holds_alternative<RoundingMode>(v); break;
    case Sort::Kind::bitvec: ok = std::holds_alternative<BitVec>(v) && std::get<BitVec>(v).width == s.a; break;
    case Sort::Kind::fp:
      ok = std::holds_alternative<FpValue>(v) && std::get<FpValue>(v).eb == s.a && std::get<FpValue>(v).sb == s.b;
      break;
  }
  if (!ok) type_error("value " + format_value(v) + " does not match the sort of " + name);
  impl_->consts[name] = std::move(v);
}

bool Interpreter::has_const(const std::string& name) const { return impl_->declared.contains(name); }

std::vector<std::string> Interpreter::declared_consts() const {
  std::vector<std::string> out;
  for (const auto& [name, sort] : impl_->declared) out.push_back(name);
  return out;
}

Value Interpreter::call(const std::string& name, std::span<const Value> args) const {
  if (args.empty()) {
    Impl::Env env;
    SExpr a;
    a.atom = name;
    return impl_->eval(a, env);
  }
  const auto f = impl_->funcs.find(name);
  if (f == impl_->funcs.end()) type_error("unknown function " + name);
  if (f->second.params.size() != args.size()) type_error(name + " called with the wrong number of arguments");
  Impl::Env env;
  for (std::size_t i = 0; i < args.size(); ++i) env.emplace_back(&f->second.params[i], args[i]);
  return impl_->eval(f->second.body, env);
}

Value Interpreter::eval(std::string_view term) const {
  const auto exprs = parse_script(term);
  if (exprs.size() != 1) type_error("expected exactly one term");
  Impl::Env env;
  return impl_->eval(exprs[0], env);
}

std::vector<bool> Interpreter::run() const {
  std::vector<std::vector<const SExpr*>> frames(1);
  std::vector<bool> results;
  for (const SExpr& cmd : impl_->commands) {
    const std::string& op = cmd.items[0].atom;
    if (op == "assert") {
      frames.back().push_back(&cmd.items.at(1));
    } else if (op == "push" || op == "pop") {
      const int count = cmd.items.size() > 1 ? to_int(cmd.items[1]) : 1;
      for (int i = 0; i < count; ++i) {
        if (op == "push") {
          frames.emplace_back();
        } else {
          if (frames.size() == 1) type_error("pop without matching push");
          frames.pop_back();
        }
      }
    } else if (op == "check-sat") {
      bool all = true;
      for (const auto& frame : frames) {
        for (const SExpr* a : frame) {
          Impl::Env env;
          all = all && Impl::boolean(impl_->eval(*a, env));
        }
      }
      results.push_back(all);
    }
  }
  return results;
}

}  // namespace tcsem::smt
