#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace imbaug {

// Dense row-major matrix of doubles. Rows are samples, columns are features.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols_, cols_};
  }

  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

  void fill(double v);
  void append_row(std::span<const double> row);
  void reserve_rows(std::size_t rows) { values_.reserve(rows * cols_); }

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// [a | b] column-wise; row counts must agree.
Matrix hconcat(const Matrix& a, const Matrix& b);
Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices);
// Columns [first, first + count).
Matrix column_block(const Matrix& m, std::size_t first, std::size_t count);

}  // namespace imbaug
