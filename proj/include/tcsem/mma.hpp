#pragma once

// Matrix-level multiply-accumulate D = A·B + C built from the dot-product
// unit, and chaining of several steps for inner dimensions larger than k.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tcsem/accumulator.hpp"
#include "tcsem/bitfloat.hpp"

namespace tcsem {

enum class ElementType : std::uint8_t { f16, f32 };

std::string_view to_string(ElementType t);

/// Row-major matrix of FP16 or FP32 bit patterns.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, ElementType type);  // zero-filled

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  ElementType type() const { return type_; }

  MixedScalar at(int r, int c) const;
  F16Bits f16(int r, int c) const;  // throws unless type() == f16
  F32Bits f32(int r, int c) const;  // exact widening for FP16 matrices
  /// The value must carry the matrix's element type.
  void set(int r, int c, const MixedScalar& v);

  std::vector<F16Bits> row_f16(int r) const;
  std::vector<F16Bits> col_f16(int c) const;

  Matrix transposed() const;

  const std::vector<std::uint32_t>& raw() const { return bits_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t index(int r, int c) const;

  int rows_ = 0;
  int cols_ = 0;
  ElementType type_ = ElementType::f32;
  std::vector<std::uint32_t> bits_;
};

Matrix identity_f16(int n);

struct MmaShape {
  int m = 4;
  int n = 4;
  int k = 4;
};

/// Per-step shape: 4x4x4 on Volta/Turing, 8x8x8 on Ampere.
MmaShape preset_shape(ArchPreset arch);

/// One instruction step on exactly the preset shape. D takes `d_type`.
Matrix mma_step(const Matrix& a, const Matrix& b, const Matrix& c, ArchPreset arch, ElementType d_type);

/// Any m and n; the inner dimension must equal cfg.k_products. D's type follows cfg.out_precision.
Matrix mma_step(const Matrix& a, const Matrix& b, const Matrix& c, const AccumulatorConfig& cfg);

enum class SliceOrder : std::uint8_t { ascending, descending };

/// Chains k-wide slices of the inner dimension, each step's D feeding the next
/// step's C. K is zero-padded up to a multiple of k. Intermediate and final
/// results use cfg.out_precision.
Matrix gemm_chained(const Matrix& a, const Matrix& b, const Matrix& c, const AccumulatorConfig& cfg,
                    SliceOrder order = SliceOrder::ascending);

/// CSV with a `# f16|f32 rows cols` header; cells use the numeric literal
/// syntax and are written as hex bit patterns.
Matrix read_matrix_csv(std::string_view text);
Matrix read_matrix_file(const std::string& path);
std::string write_matrix_csv(const Matrix& m);

}  // namespace tcsem
