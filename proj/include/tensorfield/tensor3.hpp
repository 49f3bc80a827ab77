#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tensorfield {

/// Shape/contract violations raised by tensor and matrix operations.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failures (singular systems, non-finite losses, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense rank-3 tensor of doubles.
///
/// Canonical layout: mode-1 index varies fastest, then mode-2, then mode-3
/// (column-major convention), so vectorize() is the identity view of data().
class Tensor3 {
 public:
  Tensor3() : dims_{0, 0, 0} {}

  Tensor3(int i, int j, int k, double fill = 0.0) : dims_{i, j, k} {
    if (i <= 0 || j <= 0 || k <= 0)
      throw ShapeError("Tensor3: dimensions must be positive, got (" +
                       std::to_string(i) + "," + std::to_string(j) + "," +
                       std::to_string(k) + ")");
    data_.assign(static_cast<std::size_t>(i) * j * k, fill);
  }

  Tensor3(std::array<int, 3> dims, double fill = 0.0)
      : Tensor3(dims[0], dims[1], dims[2], fill) {}

  std::array<int, 3> shape() const { return dims_; }
  int dim(int mode) const { return dims_[mode - 1]; }  // mode in {1,2,3}
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // 0-based element access
  double& operator()(int i, int j, int k) {
    return data_[static_cast<std::size_t>(i) +
                 static_cast<std::size_t>(dims_[0]) * (j + static_cast<std::size_t>(dims_[1]) * k)];
  }
  double operator()(int i, int j, int k) const {
    return data_[static_cast<std::size_t>(i) +
                 static_cast<std::size_t>(dims_[0]) * (j + static_cast<std::size_t>(dims_[1]) * k)];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const Tensor3& other) const { return dims_ == other.dims_; }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  std::array<int, 3> dims_;
  std::vector<double> data_;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}

  Matrix(int rows, int cols, double fill = 0.0) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0)
      throw ShapeError("Matrix: dimensions must be positive, got (" +
                       std::to_string(rows) + "," + std::to_string(cols) + ")");
    data_.assign(static_cast<std::size_t>(rows) * cols, fill);
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int rows_, cols_;
  std::vector<double> data_;
};

inline std::string shape_str(const std::array<int, 3>& d) {
  return "(" + std::to_string(d[0]) + "," + std::to_string(d[1]) + "," +
         std::to_string(d[2]) + ")";
}

}  // namespace tensorfield
