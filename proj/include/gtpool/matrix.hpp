#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace gtpool {

/// Dense row-major float64 matrix. Plain value type; the autodiff layer wraps it.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  /// Builds a matrix from nested rows; throws DimensionError on ragged input.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);
  static Matrix row_vector(std::span<const double> values);

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }
  bool all_finite() const;
  void fill(double v);

  /// "RxC", used in error messages.
  std::string shape_str() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

}  // namespace gtpool
