#pragma once

// SMT-LIB v2.6 emission. Each document is quantifier-free over floating point
// and bitvectors (QF_BVFP); its models are the discriminating inputs of one
// property. Inputs are declared as raw IEEE bit patterns so a model reads back
// directly as a `name=0xHEX` assignment for check_witness. The tensor core
// datapath is encoded over bitvectors, since the floating-point theory always
// normalizes intermediate sums.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcsem/accumulator.hpp"
#include "tcsem/discriminator.hpp"

namespace tcsem {

struct SmtDocument {
  std::string logic;                    // empty for a fragment
  std::vector<std::string> header;      // comment lines, without the leading "; "
  std::vector<std::string> declarations;
  std::vector<std::pair<std::string, std::string>> definitions;  // name, text
  std::vector<std::string> assertions;
  std::vector<std::string> commands;    // check-sat, get-model, push/pop blocks

  /// Adds a definition unless one with the same name is already present.
  void define(const std::string& name, std::string text);
  void merge_definitions(const SmtDocument& fragment);
  bool defines(std::string_view name) const;

  std::string render() const;
};

/// Bit-level helpers shared by every accumulator definition: FP32 term
/// fields and the exact FP16 x FP16 -> FP32 product `fp16-mul-bits`.
SmtDocument emit_model_helpers();

/// `no-normalize-sum<suffix>` over k products and the addend (FP32 bit
/// patterns), plus `tensor-dot<suffix>` over raw FP16 operands. Both return
/// the truncated FP32 result as a bit pattern.
SmtDocument emit_accumulator_definition(const AccumulatorConfig& cfg, std::string_view suffix = "");

/// Whole document for a property. `label` names the configuration in the header.
/// Throws std::invalid_argument when k is too small for the property.
SmtDocument emit_property(PropertyId prop, const ProbeContext& ctx, std::string_view label);

/// `<property>_<label>.smt2` with underscores, e.g. carry_bits_volta.smt2.
std::string smt_file_name(PropertyId prop, std::string_view label);

}  // namespace tcsem
