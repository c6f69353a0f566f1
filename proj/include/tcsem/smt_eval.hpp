#pragma once

// A small SMT-LIB v2.6 reader and ground-term interpreter, enough to run the
// documents smtgen writes against concrete assignments: Core, fixed-size
// bitvectors up to 64 bits, and floating point of any (eb, sb) computed
// exactly and then rounded.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tcsem/exact.hpp"

namespace tcsem::smt {

struct SExpr {
  enum class Kind : std::uint8_t { atom, list };
  Kind kind = Kind::atom;
  std::string atom;
  std::vector<SExpr> items;

  bool is_atom() const { return kind == Kind::atom; }
  bool is_atom(std::string_view s) const { return kind == Kind::atom && atom == s; }
  std::string to_string() const;
};

/// Parses a whole script into top-level expressions; throws ParseError.
std::vector<SExpr> parse_script(std::string_view text);

struct BitVec {
  int width = 1;
  std::uint64_t bits = 0;

  friend bool operator==(const BitVec&, const BitVec&) = default;
};

struct FpValue {
  int eb = 8;
  int sb = 24;
  ExactDyadic value;  // nan, signed infinity, or finite with signed zero
};

using Value = std::variant<bool, BitVec, FpValue, RoundingMode>;

/// Structural equality as SMT-LIB `=`: all NaNs are equal, +0 and -0 differ.
bool same_value(const Value& a, const Value& b);
std::string format_value(const Value& v);

/// Correct rounding into the (eb, sb) format, overflow per the rounding mode.
FpValue round_fp(const ExactDyadic& v, int eb, int sb, RoundingMode rm);
FpValue fp_from_bits(int eb, int sb, std::uint64_t bits);
std::uint64_t fp_to_bits(const FpValue& v);  // NaN encodes as the canonical quiet NaN

class Interpreter {
 public:
  Interpreter();
  ~Interpreter();
  Interpreter(Interpreter&&) noexcept;
  Interpreter& operator=(Interpreter&&) noexcept;

  /// Loads a script: definitions are registered, every other command is kept for run().
  void load(std::string_view text);

  void set_const(const std::string& name, Value v);
  bool has_const(const std::string& name) const;
  std::vector<std::string> declared_consts() const;

  /// Evaluates a defined function (or a declared constant when args is empty).
  Value call(const std::string& name, std::span<const Value> args) const;
  Value eval(std::string_view term) const;

  /// Runs the kept commands in order, honouring push/pop; each check-sat
  /// reports whether every assertion in scope holds for the current constants.
  std::vector<bool> run() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tcsem::smt
