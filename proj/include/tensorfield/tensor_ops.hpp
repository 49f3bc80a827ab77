#pragma once

#include <vector>

#include "tensorfield/tensor3.hpp"

namespace tensorfield {

/// Mode-n product t x_n m: contracts mode n of t (size I_n) with m (r x I_n),
/// replacing that mode's dimension with r. Mode is 1-based.
Tensor3 mode_n_product(const Tensor3& t, const Matrix& m, int mode);

/// Mode-n unfolding: matrix of shape (I_n, prod of the other dims), column
/// index ordered with the lower remaining mode varying fastest.
Matrix mode_n_unfold(const Tensor3& t, int mode);

/// Inverse of mode_n_unfold for the given target shape.
Tensor3 mode_n_fold(const Matrix& m, int mode, std::array<int, 3> shape);

/// core x_1 u1 x_2 u2 x_3 u3.
Tensor3 tucker_compose(const Tensor3& core, const Matrix& u1, const Matrix& u2,
                       const Matrix& u3);

double inner_product(const Tensor3& a, const Tensor3& b);
double frobenius_norm_sq(const Tensor3& a);
Tensor3 hadamard(const Tensor3& a, const Tensor3& b);
Matrix kronecker(const Matrix& a, const Matrix& b);

/// Canonical vectorization (mode-1 index fastest): a copy of the raw data.
std::vector<double> vectorize(const Tensor3& a);

// Matrix helpers.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix matvec_as_column(const Matrix& a, const std::vector<double>& x);

}  // namespace tensorfield
