#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "support.hpp"
#include "tcsem/exact.hpp"
#include "tcsem/mma.hpp"
#include "tcsem/numeric_text.hpp"

using namespace tcsem;

namespace {

F16Bits h(std::string_view s) { return parse_float<Binary16>(s); }
F32Bits f(std::string_view s) { return parse_float<Binary32>(s); }

Matrix random_f16(testing::ValueSource& src, int rows, int cols, int lo = -8, int hi = 8) {
  Matrix m(rows, cols, ElementType::f16);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m.set(r, c, src.f16_in_range(lo, hi));
  }
  return m;
}

Matrix random_f32(testing::ValueSource& src, int rows, int cols) {
  Matrix m(rows, cols, ElementType::f32);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m.set(r, c, mul_f16_exact(src.f16_in_range(-6, 6), src.f16_in_range(-6, 6)));
  }
  return m;
}

}  // namespace

TEST_SUITE("mma") {
  TEST_CASE("matrix basics") {
    Matrix m(2, 3, ElementType::f16);
    m.set(1, 2, h("2"));
    CHECK(m.f16(1, 2) == h("2"));
    CHECK(m.f32(1, 2) == f("2"));
    CHECK_THROWS_AS(m.set(0, 0, f("1")), std::invalid_argument);
    CHECK_THROWS_AS(m.at(2, 0), std::out_of_range);
    CHECK_THROWS_AS(Matrix(0, 1, ElementType::f16), std::invalid_argument);
    CHECK(m.transposed().f16(2, 1) == h("2"));
    CHECK(preset_shape(ArchPreset::ampere).m == 8);
  }

  TEST_CASE("identity times B reproduces B") {
    testing::ValueSource src(51);
    for (int t = 0; t < 200; ++t) {
      Matrix b(4, 4, ElementType::f16);
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) b.set(r, c, src.f16_finite());
      }
      const Matrix d = mma_step(identity_f16(4), b, Matrix(4, 4, ElementType::f32), ArchPreset::volta,
                                ElementType::f32);
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          const F32Bits want = b.f16(r, c).is_zero() ? F32Bits::zero() : f16_to_f32_exact(b.f16(r, c));
          REQUIRE(d.f32(r, c) == want);
        }
      }
    }
  }

  TEST_CASE("all-ones product") {
    Matrix ones(4, 4, ElementType::f16);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) ones.set(r, c, h("1"));
    }
    const Matrix d = mma_step(ones, ones, Matrix(4, 4, ElementType::f32), ArchPreset::volta, ElementType::f32);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) CHECK(d.f32(r, c) == f("4"));
    }
    const Matrix d16 = mma_step(ones, ones, Matrix(4, 4, ElementType::f16), ArchPreset::volta, ElementType::f16);
    CHECK(d16.f16(3, 3) == h("4"));
  }

  TEST_CASE("case-study element embedded in a matrix") {
    Matrix a(4, 4, ElementType::f16);
    Matrix b(4, 4, ElementType::f16);
    const char* av[] = {"1.0009765625*2^-8", "1.326171875*2^-14", "1*2^-12", "1*2^-12"};
    const char* bv[] = {"1.998046875*2^7", "1.4443359375*2^-7", "1*2^-12", "1*2^-12"};
    for (int i = 0; i < 4; ++i) {
      a.set(0, i, h(av[i]));
      b.set(i, 0, h(bv[i]));
    }
    Matrix c(4, 4, ElementType::f32);
    c.set(0, 0, f("1*2^-24"));
    const Matrix d = mma_step(a, b, c, ArchPreset::volta, ElementType::f32);
    CHECK(to_exact(d.f32(0, 0)) == ExactDyadic::from_int(1) + ExactDyadic::pow2(-23));
  }

  TEST_CASE("shape checks") {
    const Matrix a(4, 4, ElementType::f16);
    const Matrix c(4, 4, ElementType::f32);
    CHECK_THROWS_AS(mma_step(a, Matrix(3, 4, ElementType::f16), c, ArchPreset::volta, ElementType::f32),
                    std::invalid_argument);
    CHECK_THROWS_AS(mma_step(a, a, Matrix(4, 3, ElementType::f32), ArchPreset::volta, ElementType::f32),
                    std::invalid_argument);
    CHECK_THROWS_AS(mma_step(a, a, c, ArchPreset::ampere, ElementType::f32), std::invalid_argument);
    CHECK_THROWS_AS(mma_step(Matrix(4, 4, ElementType::f32), a, c, ArchPreset::volta, ElementType::f32),
                    std::invalid_argument);
    CHECK_THROWS_AS(gemm_chained(Matrix(2, 5, ElementType::f16), Matrix(4, 2, ElementType::f16),
                                 Matrix(2, 2, ElementType::f32), preset_config(ArchPreset::volta)),
                    std::invalid_argument);
  }

  TEST_CASE("chaining") {
    testing::ValueSource src(52);
    const AccumulatorConfig volta = preset_config(ArchPreset::volta);
    SUBCASE("a single slice is one step") {
      const Matrix a = random_f16(src, 4, 4);
      const Matrix b = random_f16(src, 4, 4);
      const Matrix c = random_f32(src, 4, 4);
      CHECK(gemm_chained(a, b, c, volta) == mma_step(a, b, c, ArchPreset::volta, ElementType::f32));
    }
    SUBCASE("two Volta slices differ from one Ampere step") {
      Matrix a(1, 8, ElementType::f16);
      Matrix b(8, 1, ElementType::f16);
      a.set(0, 0, h("1"));
      b.set(0, 0, h("1"));
      a.set(0, 1, h("1*2^-12"));
      b.set(1, 0, h("1*2^-12"));
      a.set(0, 4, h("1*2^-12"));
      b.set(4, 0, h("1*2^-12"));
      const Matrix c(1, 1, ElementType::f32);
      const F32Bits chained = gemm_chained(a, b, c, volta).f32(0, 0);
      const F32Bits ampere = mma_step(a, b, c, preset_config(ArchPreset::ampere)).f32(0, 0);
      const ExactDyadic exact = exact_dot(a.row_f16(0), b.col_f16(0), F32Bits{});
      CHECK(chained == f("1"));
      CHECK(to_exact(ampere) == exact);
      CHECK(chained != ampere);
    }
    SUBCASE("uneven K is zero-padded") {
      const Matrix a = random_f16(src, 3, 6);
      const Matrix b = random_f16(src, 6, 2);
      Matrix ap(3, 8, ElementType::f16);
      Matrix bp(8, 2, ElementType::f16);
      for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 6; ++k) ap.set(i, k, a.f16(i, k));
      }
      for (int k = 0; k < 6; ++k) {
        for (int j = 0; j < 2; ++j) bp.set(k, j, b.f16(k, j));
      }
      const Matrix c(3, 2, ElementType::f32);
      CHECK(gemm_chained(a, b, c, volta) == gemm_chained(ap, bp, c, volta));
    }
    SUBCASE("B = 0 passes C through") {
      const Matrix c = random_f32(src, 4, 4);
      const Matrix d = gemm_chained(random_f16(src, 4, 12), Matrix(12, 4, ElementType::f16), c, volta);
      CHECK(d == c);
    }
    SUBCASE("slice order is deterministic and can matter") {
      const Matrix a = random_f16(src, 4, 16, -12, 4);
      const Matrix b = random_f16(src, 16, 4, -12, 4);
      const Matrix c = random_f32(src, 4, 4);
      CHECK(gemm_chained(a, b, c, volta) == gemm_chained(a, b, c, volta));
      const Matrix desc = gemm_chained(a, b, c, volta, SliceOrder::descending);
      CHECK(desc.rows() == 4);
    }
  }

  TEST_CASE("row permutation commutes with the product") {
    testing::ValueSource src(53);
    const AccumulatorConfig cfg = preset_config(ArchPreset::ampere);
    for (int t = 0; t < 10000; ++t) {
      const Matrix a = random_f16(src, 3, 8);
      const Matrix b = random_f16(src, 8, 2);
      const Matrix c = random_f32(src, 3, 2);
      std::array<int, 3> perm{0, 1, 2};
      std::shuffle(perm.begin(), perm.end(), std::mt19937(static_cast<unsigned>(t)));
      Matrix ap(3, 8, ElementType::f16);
      Matrix cp(3, 2, ElementType::f32);
      for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 8; ++k) ap.set(i, k, a.f16(perm[i], k));
        for (int j = 0; j < 2; ++j) cp.set(i, j, c.at(perm[i], j));
      }
      const Matrix d = mma_step(a, b, c, cfg);
      const Matrix dp = mma_step(ap, b, cp, cfg);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 2; ++j) REQUIRE(dp.at(i, j) == d.at(perm[i], j));
      }
    }
  }

  TEST_CASE("CSV round trip and diagnostics") {
    testing::ValueSource src(54);
    const Matrix m16 = random_f16(src, 3, 5);
    CHECK(read_matrix_csv(write_matrix_csv(m16)) == m16);
    const Matrix m32 = random_f32(src, 2, 2);
    CHECK(read_matrix_csv(write_matrix_csv(m32)) == m32);
    CHECK(write_matrix_csv(identity_f16(2)) == "# f16 2 2\n0x3C00,0x0000\n0x0000,0x3C00\n");
    const Matrix parsed = read_matrix_csv("# f32 1 3\r\n1, 0.5*2^-3 ,0x3F800000\n\n");
    CHECK(parsed.f32(0, 1) == f("1*2^-4"));
    CHECK_THROWS_AS(read_matrix_csv(""), ParseError);
    CHECK_THROWS_AS(read_matrix_csv("f16 1 1\n1\n"), ParseError);
    CHECK_THROWS_AS(read_matrix_csv("# f16 2 1\n1\n"), ParseError);
    CHECK_THROWS_AS(read_matrix_csv("# f16 1 2\n1\n"), ParseError);
    CHECK_THROWS_AS(read_matrix_csv("# f16 1 1\n1f32\n"), ParseError);
    CHECK_THROWS_AS(read_matrix_csv("# f16 1 1\n0x3F800000\n"), ParseError);
    CHECK_THROWS_AS(read_matrix_file("/nonexistent/m.csv"), ParseError);
  }
}
