#include "tensorfield/tensor_ops.hpp"

#include "doctest.h"
#include "test_util.hpp"

using namespace tensorfield;
using namespace tftest;

namespace {

// t(i,j,k) = i + 2(j-1) + 4(k-1) with 1-based indices
Tensor3 counting_tensor() {
  Tensor3 t(2, 2, 2);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) t(i, j, k) = (i + 1) + 2 * j + 4 * k;
  return t;
}

std::array<int, 3> random_shape(Rng& rng, int lo = 1, int hi = 5) {
  auto dim = [&] { return lo + static_cast<int>(rng.below(hi - lo + 1)); };
  return {dim(), dim(), dim()};
}

}  // namespace

TEST_CASE("mode product with identity leaves the tensor unchanged") {
  Rng rng(1);
  Tensor3 t = random_tensor({2, 2, 2}, rng);
  for (int mode = 1; mode <= 3; ++mode) {
    Tensor3 out = mode_n_product(t, Matrix::identity(2), mode);
    CHECK(max_abs_diff(out, t) == 0.0);
  }
}

TEST_CASE("mode-1 product with an all-ones row sums mode-1 fibers") {
  Tensor3 t(2, 2, 2, 1.0);
  Matrix row(1, 2);
  row(0, 0) = row(0, 1) = 1.0;
  Tensor3 out = mode_n_product(t, row, 1);
  CHECK(out.shape() == std::array<int, 3>{1, 2, 2});
  for (double v : out.values()) CHECK(v == 2.0);
}

TEST_CASE("mode-2 product propagates a single nonzero entry") {
  Tensor3 t(2, 2, 2);
  t(0, 0, 0) = 1.0;  // (1,1,1) in 1-based terms
  Matrix m(2, 2);
  m(0, 0) = 2.5;  // a
  m(0, 1) = -1.0; // b
  m(1, 0) = 4.0;  // c
  m(1, 1) = 0.5;  // d
  Tensor3 out = mode_n_product(t, m, 2);
  CHECK(out(0, 0, 0) == 2.5);
  CHECK(out(0, 1, 0) == 4.0);
  double sum_sq = frobenius_norm_sq(out);
  CHECK(sum_sq == doctest::Approx(2.5 * 2.5 + 4.0 * 4.0));
}

TEST_CASE("mode product errors name the mode and both sizes") {
  Tensor3 t(2, 3, 4);
  Matrix m(5, 7);
  CHECK_THROWS_WITH_AS(mode_n_product(t, m, 2),
                       doctest::Contains("mode-2"), ShapeError);
  try {
    mode_n_product(t, m, 2);
  } catch (const ShapeError& e) {
    std::string msg = e.what();
    CHECK(msg.find("7") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
  CHECK_THROWS_AS(mode_n_product(t, m, 0), ShapeError);
  CHECK_THROWS_AS(mode_n_product(t, m, 4), ShapeError);
}

TEST_CASE("mode product matches the defining summation on random instances") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    auto shape = random_shape(rng);
    Tensor3 t = random_tensor(shape, rng);
    const int mode = 1 + static_cast<int>(rng.below(3));
    const int rows = 1 + static_cast<int>(rng.below(5));
    Matrix m = random_matrix(rows, shape[mode - 1], rng);
    Tensor3 got = mode_n_product(t, m, mode);
    Tensor3 expect = mode_n_product_reference(t, m, mode);
    CHECK(max_abs_diff(got, expect) < 1e-12);
  }
}

TEST_CASE("unfold follows the index map") {
  Tensor3 t = counting_tensor();
  Matrix m1 = mode_n_unfold(t, 1);
  REQUIRE(m1.rows() == 2);
  REQUIRE(m1.cols() == 4);
  const double expect1[2][4] = {{1, 3, 5, 7}, {2, 4, 6, 8}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) CHECK(m1(r, c) == expect1[r][c]);

  Matrix m3 = mode_n_unfold(t, 3);
  const double expect3[2][4] = {{1, 2, 3, 4}, {5, 6, 7, 8}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) CHECK(m3(r, c) == expect3[r][c]);
}

TEST_CASE("fold inverts unfold") {
  Matrix m(2, 4);
  const double vals[2][4] = {{1, 3, 5, 7}, {2, 4, 6, 8}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = vals[r][c];
  Tensor3 t = mode_n_fold(m, 1, {2, 2, 2});
  CHECK(t == counting_tensor());

  Tensor3 scalar = mode_n_fold(Matrix(1, 1, 5.0), 2, {1, 1, 1});
  CHECK(scalar(0, 0, 0) == 5.0);

  CHECK_THROWS_AS(mode_n_fold(m, 1, {2, 2, 3}), ShapeError);
}

TEST_CASE("fold/unfold round trip on random tensors, all modes") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto shape = random_shape(rng, 1, 6);
    Tensor3 t = random_tensor(shape, rng);
    for (int mode = 1; mode <= 3; ++mode)
      CHECK(mode_n_fold(mode_n_unfold(t, mode), mode, shape) == t);
  }
}

TEST_CASE("repeated same-mode products compose as a matrix product") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    auto shape = random_shape(rng, 2, 5);
    Tensor3 t = random_tensor(shape, rng);
    const int mode = 1 + static_cast<int>(rng.below(3));
    Matrix a = random_matrix(3, shape[mode - 1], rng);
    Matrix b = random_matrix(4, 3, rng);
    Tensor3 two_steps = mode_n_product(mode_n_product(t, a, mode), b, mode);
    Tensor3 one_step = mode_n_product(t, matmul(b, a), mode);
    CHECK(max_abs_diff(two_steps, one_step) < 1e-12);
  }
}

TEST_CASE("distinct-mode products commute") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto shape = random_shape(rng, 2, 5);
    Tensor3 t = random_tensor(shape, rng);
    Matrix a = random_matrix(3, shape[0], rng);
    Matrix b = random_matrix(2, shape[1], rng);
    Tensor3 ab = mode_n_product(mode_n_product(t, a, 1), b, 2);
    Tensor3 ba = mode_n_product(mode_n_product(t, b, 2), a, 1);
    CHECK(max_abs_diff(ab, ba) < 1e-12);
  }
}

TEST_CASE("tucker compose basics") {
  Rng rng(9);
  Tensor3 core = random_tensor({2, 2, 2}, rng);
  Tensor3 same = tucker_compose(core, Matrix::identity(2), Matrix::identity(2),
                                Matrix::identity(2));
  CHECK(max_abs_diff(same, core) == 0.0);

  // rank-1 outer product of all-ones columns
  Tensor3 unit(1, 1, 1, 1.0);
  Matrix c1(2, 1, 1.0), c2(3, 1, 1.0), c3(4, 1, 1.0);
  Tensor3 ones = tucker_compose(unit, c1, c2, c3);
  CHECK(ones.shape() == std::array<int, 3>{2, 3, 4});
  for (double v : ones.values()) CHECK(v == 1.0);
}

TEST_CASE("vec of a tucker composition equals the kronecker product action") {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    auto shape = random_shape(rng, 2, 4);
    Tensor3 core = random_tensor(shape, rng);
    Matrix w1 = random_matrix(2 + static_cast<int>(rng.below(3)), shape[0], rng);
    Matrix w2 = random_matrix(2 + static_cast<int>(rng.below(3)), shape[1], rng);
    Matrix w3 = random_matrix(2 + static_cast<int>(rng.below(3)), shape[2], rng);
    Tensor3 composed = tucker_compose(core, w1, w2, w3);

    Matrix big = kronecker(w3, kronecker(w2, w1));
    Matrix vec_out = matvec_as_column(big, vectorize(core));
    const auto lhs = vectorize(composed);
    REQUIRE(lhs.size() == static_cast<std::size_t>(vec_out.rows()));
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(std::abs(lhs[i] - vec_out(static_cast<int>(i), 0)) < 1e-10);
  }
}

TEST_CASE("inner product and norms") {
  Tensor3 ones(2, 2, 2, 1.0);
  CHECK(inner_product(ones, ones) == 8.0);

  Rng rng(11);
  Tensor3 a = random_tensor({3, 2, 4}, rng);
  Tensor3 zero(3, 2, 4);
  CHECK(inner_product(a, zero) == 0.0);
  CHECK(inner_product(a, a) == doctest::Approx(frobenius_norm_sq(a)).epsilon(1e-15));

  Tensor3 halves(2, 2, 2, 0.5);
  CHECK(frobenius_norm_sq(halves) == doctest::Approx(2.0));

  Tensor3 wrong(2, 2, 3);
  CHECK_THROWS_AS(inner_product(a, wrong), ShapeError);
}

TEST_CASE("hadamard and kronecker") {
  Rng rng(12);
  Tensor3 a = random_tensor({2, 3, 2}, rng);
  Tensor3 ones(2, 3, 2, 1.0);
  CHECK(hadamard(a, ones) == a);
  CHECK_THROWS_AS(hadamard(a, Tensor3(2, 3, 3)), ShapeError);

  Matrix two(1, 1, 2.0);
  Matrix m = random_matrix(3, 4, rng);
  Matrix doubled = kronecker(two, m);
  REQUIRE(doubled.rows() == 3);
  REQUIRE(doubled.cols() == 4);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) CHECK(doubled(r, c) == 2.0 * m(r, c));
}
