#include "gtpool/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "gtpool/errors.hpp"

namespace gtpool {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = rows.size() == 0 ? 0 : rows.begin()->size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& r : rows) {
    if (r.size() != m.cols) throw DimensionError("Matrix::from_rows: ragged rows");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  Matrix m(values.size(), 1);
  std::copy(values.begin(), values.end(), m.data.begin());
  return m;
}

Matrix Matrix::row_vector(std::span<const double> values) {
  Matrix m(1, values.size());
  std::copy(values.begin(), values.end(), m.data.begin());
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

void Matrix::fill(double v) { std::fill(data.begin(), data.end(), v); }

std::string Matrix::shape_str() const { return std::to_string(rows) + "x" + std::to_string(cols); }

}  // namespace gtpool
