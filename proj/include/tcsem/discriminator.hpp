#pragma once

// Discriminating-input search. Each property names a set of input variables,
// a set of candidate models evaluated on them, and the pair of candidates
// whose disagreement is sought. Search is either exhaustive over FP16 domains
// or randomized with a counter-based generator, so results never depend on
// the number of worker threads.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcsem/accumulator.hpp"
#include "tcsem/exact.hpp"

namespace tcsem {

enum class PropertyId : std::uint8_t {
  exact_mul,
  accum_precision,
  final_rounding,
  accum_rounding,
  accum_order,
  normalization,
  carry_bits,
  guard_bits,
  markidis_vs_ootomo,
};

inline constexpr PropertyId kAllProperties[] = {
    PropertyId::exact_mul,     PropertyId::accum_precision, PropertyId::final_rounding,
    PropertyId::accum_rounding, PropertyId::accum_order,    PropertyId::normalization,
    PropertyId::carry_bits,    PropertyId::guard_bits,      PropertyId::markidis_vs_ootomo,
};

std::string_view to_string(PropertyId p);  // kebab-case, e.g. "carry-bits"
PropertyId parse_property(std::string_view name);  // throws std::invalid_argument

enum class VarType : std::uint8_t { f16, f32 };

struct Variable {
  std::string name;
  VarType type = VarType::f16;
  bool positive = false;       // the side condition requires a positive value
  bool product_scale = false;  // f32 addend sampled over the exponent range of FP16 products
};

struct NamedValue {
  std::string name;
  MixedScalar value;

  friend bool operator==(const NamedValue&, const NamedValue&) = default;
};

using CandidatePair = std::pair<std::string, std::string>;

/// Evaluation context: architecture plus optional datapath overrides and pair.
struct ProbeContext {
  AccumulatorConfig config = preset_config(ArchPreset::volta);
  std::optional<CandidatePair> compare;  // default pair of the property when empty

  static ProbeContext for_arch(ArchPreset arch) { return {preset_config(arch), std::nullopt}; }
};

struct Schema {
  PropertyId property = PropertyId::exact_mul;
  std::vector<Variable> variables;
  std::vector<std::string> candidates;  // standard candidates, always reported
  CandidatePair compared;               // after applying the context override
  std::string statement;                // one-line description of what a witness shows
  std::pair<int, int> default_exponent_range;
};

/// Schema for the property under a context; throws on an unknown candidate name.
Schema schema_for(PropertyId prop, const ProbeContext& ctx);

struct CandidateOutput {
  std::string name;
  MixedScalar value;

  friend bool operator==(const CandidateOutput&, const CandidateOutput&) = default;
};

struct Witness {
  PropertyId property = PropertyId::exact_mul;
  std::uint64_t trial = 0;  // search index that produced it
  std::vector<NamedValue> inputs;
  std::vector<CandidateOutput> outputs;
  CandidatePair compared;
  ExactDyadic oracle;
  bool side_condition = false;
  bool discriminates = false;

  const MixedScalar& output(std::string_view name) const;  // throws std::out_of_range
  const MixedScalar& input(std::string_view name) const;
};

/// Evaluates every candidate on the assignment. Names and types must match the
/// schema exactly (in any order); missing, extra or mistyped values throw std::invalid_argument.
Witness check_witness(PropertyId prop, std::span<const NamedValue> assignment, const ProbeContext& ctx);

/// Parses `name=literal,name=literal`; values take the schema type of the name.
std::vector<NamedValue> parse_assignment(PropertyId prop, std::string_view text, const ProbeContext& ctx);

enum class SearchMode : std::uint8_t { random, exhaustive };

struct SearchConfig {
  SearchMode mode = SearchMode::random;
  std::uint64_t seed = 1;
  std::size_t limit = 1;          // witnesses to collect
  std::uint64_t trials = 1000000; // budget: random draws or enumerated points
  std::optional<std::pair<int, int>> exponent_range;  // unbiased FP16 exponents; -15 selects subnormals
  std::vector<NamedValue> pins;   // variables held fixed
  unsigned threads = 0;           // 0 = hardware concurrency
};

struct SearchResult {
  PropertyId property = PropertyId::exact_mul;
  Schema schema;
  std::vector<Witness> witnesses;  // ascending trial index
  std::uint64_t trials_run = 0;
  std::uint64_t domain_size = 0;   // exhaustive mode only

  bool found() const { return !witnesses.empty(); }
};

SearchResult search(PropertyId prop, const SearchConfig& cfg, const ProbeContext& ctx);

/// FP16 values for exhaustive enumeration: finite, positives ascending by bit
/// pattern then negatives, zeros included; exponent range [lo, hi] applies to
/// nonzero values, with lo <= -15 admitting subnormals.
std::vector<F16Bits> f16_domain(std::optional<std::pair<int, int>> exponent_range, bool positive_only);

/// Assignment a random-mode search evaluates at a given trial index.
std::vector<NamedValue> random_assignment(PropertyId prop, const SearchConfig& cfg, const ProbeContext& ctx,
                                          std::uint64_t trial);

std::string format_witness_text(const Witness& w);
std::string format_witness_record(const Witness& w);  // one JSON object
std::string format_search_text(const SearchResult& r);
std::string format_search_records(const SearchResult& r);  // one JSON object per line, then a summary line

}  // namespace tcsem
