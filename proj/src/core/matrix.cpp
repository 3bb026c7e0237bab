#include "imbaug/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imbaug/error.hpp"

namespace imbaug {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  require(values_.size() == rows * cols, ErrorKind::shape,
          "matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
              std::to_string(values_.size()) + " values");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, ErrorKind::shape, "ragged matrix literal");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

void Matrix::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

void Matrix::append_row(std::span<const double> row) {
  if (rows_ == 0 && cols_ == 0) cols_ = row.size();
  require(row.size() == cols_, ErrorKind::shape,
          "append_row width " + std::to_string(row.size()) + " into " + std::to_string(cols_));
  values_.insert(values_.end(), row.begin(), row.end());
  ++rows_;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Matrix hconcat(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), ErrorKind::shape, "hconcat row mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
    std::copy(b.row(r).begin(), b.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return out;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices) {
  Matrix out(indices.size(), m.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] < m.rows(), ErrorKind::shape, "row index out of range");
    std::copy(m.row(indices[i]).begin(), m.row(indices[i]).end(), out.row(i).begin());
  }
  return out;
}

Matrix column_block(const Matrix& m, std::size_t first, std::size_t count) {
  require(first + count <= m.cols(), ErrorKind::shape, "column block out of range");
  Matrix out(m.rows(), count);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto src = m.row(r).subspan(first, count);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace imbaug
