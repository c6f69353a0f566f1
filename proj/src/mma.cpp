#include "tcsem/mma.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tcsem/numeric_text.hpp"

namespace tcsem {

std::string_view to_string(ElementType t) { return t == ElementType::f16 ? "f16" : "f32"; }

namespace {

std::string dims(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

OutputPrecision precision_of(ElementType t) {
  return t == ElementType::f16 ? OutputPrecision::f16 : OutputPrecision::f32;
}

ElementType element_of(OutputPrecision p) { return p == OutputPrecision::f16 ? ElementType::f16 : ElementType::f32; }

void check_operands(const Matrix& a, const Matrix& b, const Matrix& c) {
  if (a.type() != ElementType::f16 || b.type() != ElementType::f16) {
    throw std::invalid_argument("mma: A and B must be f16 matrices");
  }
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("mma: inner dimensions differ, A is " + dims(a) + ", B is " + dims(b));
  }
  if (c.rows() != a.rows() || c.cols() != b.cols()) {
    throw std::invalid_argument("mma: C is " + dims(c) + ", expected " + std::to_string(a.rows()) + "x" +
                                std::to_string(b.cols()));
  }
}

}  // namespace

Matrix::Matrix(int rows, int cols, ElementType type) : rows_(rows), cols_(cols), type_(type) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("matrix dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
}

std::size_t Matrix::index(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
    throw std::out_of_range("matrix index (" + std::to_string(r) + "," + std::to_string(c) + ") outside " +
                            dims(*this));
  }
  return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
}

MixedScalar Matrix::at(int r, int c) const {
  const std::uint32_t v = bits_[index(r, c)];
  if (type_ == ElementType::f16) return F16Bits{static_cast<std::uint16_t>(v)};
  return F32Bits{v};
}

F16Bits Matrix::f16(int r, int c) const {
  if (type_ != ElementType::f16) throw std::invalid_argument("matrix holds f32 elements");
  return F16Bits{static_cast<std::uint16_t>(bits_[index(r, c)])};
}

F32Bits Matrix::f32(int r, int c) const { return widen(at(r, c)); }

void Matrix::set(int r, int c, const MixedScalar& v) {
  const bool is16 = std::holds_alternative<F16Bits>(v);
  if (is16 != (type_ == ElementType::f16)) {
    throw std::invalid_argument("element type does not match " + std::string(to_string(type_)) + " matrix");
  }
  bits_[index(r, c)] = is16 ? std::get<F16Bits>(v).bits : std::get<F32Bits>(v).bits;
}

std::vector<F16Bits> Matrix::row_f16(int r) const {
  std::vector<F16Bits> out;
  out.reserve(static_cast<std::size_t>(cols_));
  for (int c = 0; c < cols_; ++c) out.push_back(f16(r, c));
  return out;
}

std::vector<F16Bits> Matrix::col_f16(int c) const {
  std::vector<F16Bits> out;
  out.reserve(static_cast<std::size_t>(rows_));
  for (int r = 0; r < rows_; ++r) out.push_back(f16(r, c));
  return out;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_, type_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) t.bits_[t.index(c, r)] = bits_[index(r, c)];
  }
  return t;
}

Matrix identity_f16(int n) {
  Matrix m(n, n, ElementType::f16);
  for (int i = 0; i < n; ++i) m.set(i, i, F16Bits{0x3C00});
  return m;
}

MmaShape preset_shape(ArchPreset arch) {
  const int k = preset_config(arch).k_products;
  return {k, k, k};
}

Matrix mma_step(const Matrix& a, const Matrix& b, const Matrix& c, ArchPreset arch, ElementType d_type) {
  const MmaShape s = preset_shape(arch);
  if (a.rows() != s.m || a.cols() != s.k || b.rows() != s.k || b.cols() != s.n) {
    throw std::invalid_argument("mma_step: " + std::string(to_string(arch)) + " expects A " + std::to_string(s.m) +
                                "x" + std::to_string(s.k) + " and B " + std::to_string(s.k) + "x" +
                                std::to_string(s.n) + ", got A " + dims(a) + " and B " + dims(b));
  }
  AccumulatorConfig cfg = preset_config(arch);
  cfg.out_precision = precision_of(d_type);
  return mma_step(a, b, c, cfg);
}

Matrix mma_step(const Matrix& a, const Matrix& b, const Matrix& c, const AccumulatorConfig& cfg) {
  validate(cfg);
  check_operands(a, b, c);
  if (a.cols() != cfg.k_products) {
    throw std::invalid_argument("mma_step: inner dimension " + std::to_string(a.cols()) + " differs from k=" +
                                std::to_string(cfg.k_products));
  }
  Matrix d(a.rows(), b.cols(), element_of(cfg.out_precision));
  const Matrix bt = b.transposed();
  for (int i = 0; i < a.rows(); ++i) {
    const std::vector<F16Bits> row = a.row_f16(i);
    for (int j = 0; j < b.cols(); ++j) d.set(i, j, tensor_dot(row, bt.row_f16(j), c.at(i, j), cfg));
  }
  return d;
}

Matrix gemm_chained(const Matrix& a, const Matrix& b, const Matrix& c, const AccumulatorConfig& cfg,
                    SliceOrder order) {
  validate(cfg);
  check_operands(a, b, c);
  const int k = cfg.k_products;
  const int inner = a.cols();
  const int slices = (inner + k - 1) / k;
  Matrix acc = c;
  for (int step = 0; step < slices; ++step) {
    const int s = order == SliceOrder::ascending ? step : slices - 1 - step;
    Matrix as(a.rows(), k, ElementType::f16);
    Matrix bs(k, b.cols(), ElementType::f16);
    for (int t = 0; t < k; ++t) {
      const int col = s * k + t;
      if (col >= inner) break;  // zero padding
      for (int i = 0; i < a.rows(); ++i) as.set(i, t, a.f16(i, col));
      for (int j = 0; j < b.cols(); ++j) bs.set(t, j, b.f16(col, j));
    }
    acc = mma_step(as, bs, acc, cfg);
  }
  return acc;
}

Matrix read_matrix_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw ParseError("matrix: empty input");
  std::istringstream header{std::string(lines[0])};
  std::string hash, type;
  int rows = 0, cols = 0;
  if (!(header >> hash >> type >> rows >> cols) || hash != "#" || (type != "f16" && type != "f32")) {
    throw ParseError("matrix: header must be '# f16|f32 rows cols', got '" + std::string(lines[0]) + "'");
  }
  if (rows <= 0 || cols <= 0) throw ParseError("matrix: dimensions must be positive");
  if (lines.size() != static_cast<std::size_t>(rows) + 1) {
    throw ParseError("matrix: header declares " + std::to_string(rows) + " rows, found " +
                     std::to_string(lines.size() - 1));
  }
  const ElementType et = type == "f16" ? ElementType::f16 : ElementType::f32;
  Matrix m(rows, cols, et);
  for (int r = 0; r < rows; ++r) {
    std::vector<MixedScalar> cells;
    try {
      if (et == ElementType::f16) {
        for (const F16Bits x : parse_float_list<Binary16>(lines[r + 1])) cells.emplace_back(x);
      } else {
        for (const F32Bits x : parse_float_list<Binary32>(lines[r + 1])) cells.emplace_back(x);
      }
    } catch (const ParseError& e) {
      throw ParseError("matrix row " + std::to_string(r + 1) + ": " + e.what());
    }
    if (cells.size() != static_cast<std::size_t>(cols)) {
      throw ParseError("matrix row " + std::to_string(r + 1) + ": expected " + std::to_string(cols) + " cells, got " +
                       std::to_string(cells.size()));
    }
    for (int c = 0; c < cols; ++c) m.set(r, c, cells[static_cast<std::size_t>(c)]);
  }
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return read_matrix_csv(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string write_matrix_csv(const Matrix& m) {
  std::ostringstream os;
  os << "# " << to_string(m.type()) << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) os << (c ? "," : "") << format_hex(m.at(r, c));
    os << '\n';
  }
  return os.str();
}

}  // namespace tcsem
