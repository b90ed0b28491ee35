/*
Copyright (c) 2026 The ripple-gnn Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ripple/error.hpp"

namespace ripple {

using vec = std::vector<double>;

/// Dense row-major matrix of doubles.
class matrix {
public:
  matrix() = default;
  matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw dim_mismatch_error("matrix storage " + std::to_string(data_.size()) + " != " +
                               std::to_string(rows_) + "x" + std::to_string(cols_));
  }

  static matrix identity(std::size_t n) {
    matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  /// Appends zeroed rows; used by shard stores that grow.
  void resize_rows(std::size_t rows) {
    rows_ = rows;
    data_.resize(rows_ * cols_, 0.0);
  }

  friend bool operator==(const matrix&, const matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

namespace detail {
inline void require_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw dim_mismatch_error(std::string(what) + ": " + std::to_string(a) + " != " + std::to_string(b));
}
} // namespace detail

/// y = W x
inline void matvec(const matrix& w, std::span<const double> x, std::span<double> y) {
  detail::require_dims(w.cols(), x.size(), "matvec cols");
  detail::require_dims(w.rows(), y.size(), "matvec rows");
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto r = w.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j)
      acc += r[j] * x[j];
    y[i] = acc;
  }
}

/// y += W x
inline void matvec_add(const matrix& w, std::span<const double> x, std::span<double> y) {
  detail::require_dims(w.cols(), x.size(), "matvec cols");
  detail::require_dims(w.rows(), y.size(), "matvec rows");
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto r = w.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j)
      acc += r[j] * x[j];
    y[i] += acc;
  }
}

inline vec matvec(const matrix& w, std::span<const double> x) {
  vec y(w.rows());
  matvec(w, x, y);
  return y;
}

/// y += alpha x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  detail::require_dims(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] += alpha * x[i];
}

inline vec axpy(double alpha, std::span<const double> x, vec y) {
  axpy(alpha, x, std::span<double>(y));
  return y;
}

inline void relu_inplace(std::span<double> x) noexcept {
  for (auto& v : x)
    v = v > 0.0 ? v : 0.0;
}

inline vec relu(vec x) {
  relu_inplace(x);
  return x;
}

/// Smallest index of the maximum.
inline std::size_t argmax(std::span<const double> x) {
  if (x.empty())
    throw dim_mismatch_error("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] > x[best])
      best = i;
  return best;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  detail::require_dims(a.size(), b.size(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isnan(d))
      return std::numeric_limits<double>::infinity();
    m = std::max(m, d);
  }
  return m;
}

} // namespace ripple
