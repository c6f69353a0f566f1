#pragma once

// FP32 recovery on FP16 tensor cores: split each FP32 operand into an FP16
// head plus an FP16 residual and combine partial products. Markidis keeps all
// accumulation inside the unit; Ootomo-Yokota scales residuals by 2^11 and
// accumulates the partial results outside in FP32.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tcsem/accumulator.hpp"
#include "tcsem/exact.hpp"

namespace tcsem {

struct ResidualPair {
  F16Bits head;
  F16Bits residual;
  int scale_log2 = 0;
  bool head_overflow = false;  // |x| rounds past the FP16 range; residual is NaN
};

inline constexpr int kMarkidisScale = 0;
inline constexpr int kOotomoScale = 11;

/// head = RNE16(x); residual = RNE16((x - head) * 2^scale_log2).
ResidualPair split_residual(F32Bits x, int scale_log2);

struct SplitVector {
  std::vector<F16Bits> head;
  std::vector<F16Bits> residual;
  bool head_overflow = false;
};
SplitVector split_vector(std::span<const F32Bits> x, int scale_log2);

/// The four partial products of a split dot product.
enum class PartialTerm : std::uint8_t { rr, hr, rh, hh };  // residual*residual, head*residual, ...
using MarkidisOrder = std::array<PartialTerm, 4>;
inline constexpr MarkidisOrder kDefaultMarkidisOrder{PartialTerm::rr, PartialTerm::hr, PartialTerm::rh,
                                                     PartialTerm::hh};

struct MarkidisRun {
  F32Bits value;
  std::array<DotTrace, 4> steps;  // in evaluation order; each step's C is the previous result
};

struct OotomoRun {
  F32Bits value;
  DotTrace rr;        // t1 = R_A . R_B
  DotTrace rh;        // R_A . B16, fed as C to hr
  DotTrace hr;        // t2 = A16 . R_B + rh
  DotTrace hh;        // t3 = A16 . B16
  F32Bits outside_1;  // scale(t1, -22) + scale(t2, -11)
  F32Bits outside_2;  // ... + t3
};

/// cfg.out_precision is forced to FP32; vectors must hold cfg.k_products elements.
MarkidisRun markidis_dot_traced(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c,
                                const AccumulatorConfig& cfg, const MarkidisOrder& order = kDefaultMarkidisOrder);
F32Bits markidis_dot(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c, const AccumulatorConfig& cfg,
                     const MarkidisOrder& order = kDefaultMarkidisOrder);

OotomoRun ootomo_dot_traced(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c,
                            const AccumulatorConfig& cfg);
F32Bits ootomo_dot(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c, const AccumulatorConfig& cfg);

/// Reference for "actual": the exact dot product rounded once to FP32, or a
/// left-to-right binary64 evaluation rounded to FP32.
enum class OracleMode : std::uint8_t { exact, binary64 };

enum class Verdict : std::uint8_t { markidis_better, ootomo_better, tie };
std::string_view to_string(Verdict v);

struct ErrorReport {
  std::vector<F32Bits> a;
  std::vector<F32Bits> b;
  F32Bits c;
  OracleMode mode = OracleMode::exact;
  F32Bits markidis;
  F32Bits ootomo;
  ExactDyadic exact;          // exact value of a.b + c
  F32Bits oracle;             // the reference the verdict is measured against
  ExactDyadic markidis_error; // |markidis - oracle|
  ExactDyadic ootomo_error;   // |ootomo - oracle|
  ExactDyadic markidis_error_exact;  // |markidis - exact|
  ExactDyadic ootomo_error_exact;
  Verdict verdict = Verdict::tie;
  MarkidisRun markidis_run;
  OotomoRun ootomo_run;
};

ErrorReport compare_error(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c,
                          const AccumulatorConfig& cfg, OracleMode mode = OracleMode::exact);

ExactDyadic exact_dot_f32(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c);
F32Bits binary64_dot(std::span<const F32Bits> a, std::span<const F32Bits> b, F32Bits c);

struct CompareInstance {
  std::vector<F32Bits> a;
  std::vector<F32Bits> b;
  F32Bits c;
};

/// FP32 inputs with unbiased exponents drawn from [exp_lo, exp_hi]; deterministic in seed.
std::vector<CompareInstance> random_instances(std::uint64_t seed, std::size_t count, int k, int exp_lo, int exp_hi);

struct CompareSummary {
  std::size_t instances = 0;
  std::size_t markidis_better = 0;
  std::size_t ootomo_better = 0;
  std::size_t ties = 0;
  double max_ootomo_over_markidis = 0;  // over instances with nonzero Markidis error
  double max_markidis_over_ootomo = 0;
  std::size_t markidis_exact = 0;  // instances with zero Markidis error
  std::size_t ootomo_exact = 0;
};

CompareSummary summarize(std::span<const ErrorReport> reports);

std::string format_report_text(const ErrorReport& r);
std::string format_report_record(const ErrorReport& r);  // one JSON object, no trailing newline
std::string format_summary_text(const CompareSummary& s);
std::string format_summary_record(const CompareSummary& s);

}  // namespace tcsem
