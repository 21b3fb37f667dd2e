#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "elolab/errors.hpp"

namespace elolab {

// Dense row-major square matrix; the models here only need small M x M.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return n_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

  double row_sum(std::size_t r) const {
    double acc = 0.0;
    for (std::size_t c = 0; c < n_; ++c) acc += (*this)(r, c);
    return acc;
  }

  bool is_symmetric(double tol = 0.0) const {
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = r + 1; c < n_; ++c)
        if (std::abs((*this)(r, c) - (*this)(c, r)) > tol) return false;
    return true;
  }

  std::vector<double> multiply(const std::vector<double>& x) const {
    detail::require(x.size() == n_, "matrix-vector size mismatch");
    std::vector<double> out(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = 0; c < n_; ++c) out[r] += (*this)(r, c) * x[c];
    return out;
  }

  double max_abs_diff(const Matrix& other) const {
    detail::require(other.n_ == n_, "matrix size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i)
      worst = std::max(worst, std::abs(data_[i] - other.data_[i]));
    return worst;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace elolab
