#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nmp {

using Vec = std::vector<double>;

// Dense row-major matrix of 64-bit scalars.
struct Tensor2 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Tensor2() = default;
  Tensor2(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::size_t size() const { return data.size(); }

  bool same_shape(const Tensor2& o) const {
    return rows == o.rows && cols == o.cols;
  }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool all_finite() const {
    return std::all_of(data.begin(), data.end(),
                       [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const Tensor2&, const Tensor2&) = default;
};

// y = A x
inline Vec matvec(const Tensor2& a, const Vec& x) {
  if (x.size() != a.cols) throw std::invalid_argument("matvec: dimension mismatch");
  Vec y(a.rows, 0.0);
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double* row = a.data.data() + r * a.cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

// y = A^T x
inline Vec matvec_transpose(const Tensor2& a, const Vec& x) {
  if (x.size() != a.rows) throw std::invalid_argument("matvec_transpose: dimension mismatch");
  Vec y(a.cols, 0.0);
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double* row = a.data.data() + r * a.cols;
    for (std::size_t c = 0; c < a.cols; ++c) y[c] += row[c] * x[r];
  }
  return y;
}

}  // namespace nmp
