#include "tensorfield/tensor_ops.hpp"

#include <cstring>
#include <string>

#include "tensorfield/kernels.hpp"

namespace tensorfield {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3)
    throw ShapeError("mode index must be 1, 2 or 3, got " + std::to_string(mode));
}

}  // namespace

// The canonical layout (mode-1 index fastest) makes each mode product a
// direct gemm on a memory view, no staging copies:
//   mode 1: data viewed as row-major (J*K x I), result = view * M^T
//   mode 2: per mode-3 slab, row-major (J x I) view, result = M * view
//   mode 3: data viewed as row-major (K x I*J), result = M * view
Tensor3 mode_n_product(const Tensor3& t, const Matrix& m, int mode) {
  check_mode(mode);
  const auto [di, dj, dk] = t.shape();
  const int along = t.dim(mode);
  if (m.cols() != along)
    throw ShapeError("mode-" + std::to_string(mode) + " product: matrix has " +
                     std::to_string(m.cols()) + " columns but tensor mode-" +
                     std::to_string(mode) + " size is " + std::to_string(along));
  const int r = m.rows();
  const auto& k = kernels::active();

  if (mode == 1) {
    Tensor3 out(r, dj, dk);
    k.gemm_nt(t.data(), m.data(), out.data(),
              static_cast<std::size_t>(dj) * dk, di, r);
    return out;
  }
  if (mode == 2) {
    Tensor3 out(di, r, dk);
    const std::size_t in_slab = static_cast<std::size_t>(di) * dj;
    const std::size_t out_slab = static_cast<std::size_t>(di) * r;
    for (int z = 0; z < dk; ++z)
      k.gemm_nn(m.data(), t.data() + z * in_slab, out.data() + z * out_slab,
                r, dj, di);
    return out;
  }
  Tensor3 out(di, dj, r);
  k.gemm_nn(m.data(), t.data(), out.data(), r, dk,
            static_cast<std::size_t>(di) * dj);
  return out;
}

Matrix mode_n_unfold(const Tensor3& t, int mode) {
  check_mode(mode);
  const auto [di, dj, dk] = t.shape();
  const std::size_t rest = t.size() / t.dim(mode);
  Matrix m(t.dim(mode), static_cast<int>(rest));
  // column index: remaining modes in ascending order, lower mode fastest
  if (mode == 1) {
    for (int z = 0; z < dk; ++z)
      for (int y = 0; y < dj; ++y)
        for (int x = 0; x < di; ++x) m(x, y + dj * z) = t(x, y, z);
  } else if (mode == 2) {
    for (int z = 0; z < dk; ++z)
      for (int y = 0; y < dj; ++y)
        for (int x = 0; x < di; ++x) m(y, x + di * z) = t(x, y, z);
  } else {
    for (int z = 0; z < dk; ++z)
      for (int y = 0; y < dj; ++y)
        for (int x = 0; x < di; ++x) m(z, x + di * y) = t(x, y, z);
  }
  return m;
}

Tensor3 mode_n_fold(const Matrix& m, int mode, std::array<int, 3> shape) {
  check_mode(mode);
  Tensor3 t(shape);
  const auto [di, dj, dk] = shape;
  const std::size_t rest = t.size() / t.dim(mode);
  if (m.rows() != t.dim(mode) || static_cast<std::size_t>(m.cols()) != rest)
    throw ShapeError("mode-" + std::to_string(mode) + " fold: matrix (" +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     ") inconsistent with target shape " + shape_str(shape));
  if (mode == 1) {
    for (int z = 0; z < dk; ++z)
      for (int y = 0; y < dj; ++y)
        for (int x = 0; x < di; ++x) t(x, y, z) = m(x, y + dj * z);
  } else if (mode == 2) {
    for (int z = 0; z < dk; ++z)
      for (int y = 0; y < dj; ++y)
        for (int x = 0; x < di; ++x) t(x, y, z) = m(y, x + di * z);
  } else {
    for (int z = 0; z < dk; ++z)
      for (int y = 0; y < dj; ++y)
        for (int x = 0; x < di; ++x) t(x, y, z) = m(z, x + di * y);
  }
  return t;
}

Tensor3 tucker_compose(const Tensor3& core, const Matrix& u1, const Matrix& u2,
                       const Matrix& u3) {
  return mode_n_product(mode_n_product(mode_n_product(core, u1, 1), u2, 2), u3, 3);
}

double inner_product(const Tensor3& a, const Tensor3& b) {
  if (!a.same_shape(b))
    throw ShapeError("inner_product: shapes " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  return kernels::active().dot(a.data(), b.data(), a.size());
}

double frobenius_norm_sq(const Tensor3& a) {
  return kernels::active().sum_sq(a.data(), a.size());
}

Tensor3 hadamard(const Tensor3& a, const Tensor3& b) {
  if (!a.same_shape(b))
    throw ShapeError("hadamard: shapes " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  Tensor3 out(a.shape());
  kernels::active().mul(a.data(), b.data(), out.data(), a.size());
  return out;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      for (int p = 0; p < b.rows(); ++p)
        for (int q = 0; q < b.cols(); ++q)
          out(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return out;
}

std::vector<double> vectorize(const Tensor3& a) { return a.values(); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()));
  Matrix c(a.rows(), b.cols());
  kernels::active().gemm_nn(a.data(), b.data(), c.data(), a.rows(), a.cols(),
                            b.cols());
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

Matrix matvec_as_column(const Matrix& a, const std::vector<double>& x) {
  if (static_cast<std::size_t>(a.cols()) != x.size())
    throw ShapeError("matvec: " + std::to_string(a.cols()) + " vs " +
                     std::to_string(x.size()));
  Matrix c(a.rows(), 1);
  kernels::active().gemm_nt(a.data(), x.data(), c.data(), a.rows(), a.cols(), 1);
  return c;
}

}  // namespace tensorfield
