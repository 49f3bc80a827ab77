#include "tensorfield/baselines.hpp"

#include "doctest.h"
#include "test_util.hpp"

using namespace tensorfield;
using namespace tftest;

namespace {

ObservationSet observe_all(const Tensor3& x) {
  return observe(x, Tensor3(x.shape(), 1.0), {0.0, 0});
}

}  // namespace

TEST_CASE("spline with one sample does not crash and ignores its own center") {
  Tensor3 x(3, 3, 3);
  x(1, 1, 1) = 2.0;
  Tensor3 mask(3, 3, 3);
  mask(1, 1, 1) = 1.0;
  ObservationSet obs = observe(x, mask, {0.0, 0});
  SplineModel m = spline_fit(obs, GreenFn::distance, 1e-8);
  // g(0)=0, so the prediction at the sample comes entirely from the ridge
  // system's (huge) weight times zero distance
  CHECK(spline_predict(m, {1, 1, 1}) == 0.0);
}

TEST_CASE("spline interpolates two equal samples") {
  Tensor3 x(5, 5, 5);
  x(0, 0, 0) = 3.25;
  x(4, 4, 4) = 3.25;
  Tensor3 mask(5, 5, 5);
  mask(0, 0, 0) = 1.0;
  mask(4, 4, 4) = 1.0;
  ObservationSet obs = observe(x, mask, {0.0, 0});
  SplineModel m = spline_fit(obs, GreenFn::distance, 1e-8);
  CHECK(spline_predict(m, {0, 0, 0}) == doctest::Approx(3.25).epsilon(1e-4));
  CHECK(spline_predict(m, {4, 4, 4}) == doctest::Approx(3.25).epsilon(1e-4));
}

TEST_CASE("spline fit reproduces noiseless samples") {
  Rng rng(61);
  Tensor3 x = random_tensor({6, 6, 6}, rng);
  Tensor3 mask = sample_mask({6, 6, 6}, {0.3, 5});
  ObservationSet obs = observe(x, mask, {0.0, 0});
  SplineModel m = spline_fit(obs, GreenFn::distance, 1e-8);
  for (std::size_t n = 0; n < m.sample_indices.size(); ++n) {
    const auto idx = m.sample_indices[n];
    CHECK(spline_predict(m, idx) ==
          doctest::Approx(obs.y(idx[0], idx[1], idx[2])).epsilon(1e-3));
  }
}

TEST_CASE("spline weights are deterministic and predictions linear in the data") {
  Rng rng(62);
  Tensor3 x = random_tensor({5, 5, 5}, rng);
  Tensor3 mask = sample_mask({5, 5, 5}, {0.25, 2});
  ObservationSet obs = observe(x, mask, {0.0, 0});
  SplineModel m1 = spline_fit(obs, GreenFn::distance, 1e-8);
  SplineModel m2 = spline_fit(obs, GreenFn::distance, 1e-8);
  CHECK(m1.weights == m2.weights);

  ObservationSet doubled = obs;
  for (double& v : doubled.y.values()) v *= 2.0;
  SplineModel md = spline_fit(doubled, GreenFn::distance, 1e-8);
  for (int z = 0; z < 5; ++z)
    for (int y = 0; y < 5; ++y)
      for (int i = 0; i < 5; ++i)
        CHECK(spline_predict(md, {i, y, z}) ==
              doctest::Approx(2.0 * spline_predict(m1, {i, y, z}))
                  .epsilon(1e-9));
}

TEST_CASE("a unit weight at the origin predicts the euclidean distance") {
  SplineModel m;
  m.sample_indices = {{0, 0, 0}};
  m.weights = {1.0};
  m.green = GreenFn::distance;
  CHECK(spline_predict(m, {3, 4, 0}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(spline_predict(m, {0, 0, 0}) == 0.0);

  m.weights = {0.0};
  CHECK(spline_predict(m, {3, 4, 0}) == 0.0);
}

TEST_CASE("tucker-als recovers an exactly low-rank field from partial data") {
  Tensor3 field = synthetic_low_rank_field({10, 10, 10}, {2, 2, 2}, 8);
  Tensor3 mask = sample_mask({10, 10, 10}, {0.8, 3});
  ObservationSet obs = observe(field, mask, {0.0, 0});
  TuckerAlsConfig cfg;
  cfg.core_dims = {2, 2, 2};
  cfg.max_sweeps = 100;
  cfg.tol = 1e-12;
  cfg.seed = 1;
  TuckerAlsResult res = tucker_als_complete(obs, cfg);
  CHECK(rmse(res.x_hat, field) < 1e-2 * tensor_std(field));
  for (std::size_t s = 1; s < res.residual_history.size(); ++s)
    CHECK(res.residual_history[s] <= res.residual_history[s - 1] + 1e-9);
}

TEST_CASE("fully observed tucker-als reaches an exact factorization") {
  Tensor3 field = synthetic_low_rank_field({8, 8, 8}, {3, 2, 2}, 12);
  ObservationSet obs = observe_all(field);
  TuckerAlsConfig cfg;
  cfg.core_dims = {3, 2, 2};
  cfg.max_sweeps = 200;
  cfg.tol = 1e-14;
  cfg.seed = 2;
  TuckerAlsResult res = tucker_als_complete(obs, cfg);
  CHECK(rmse(res.x_hat, field) < 1e-6 * tensor_std(field));
}

TEST_CASE("tucker-als masked residual is non-increasing on noisy partial data") {
  Tensor3 field = synthetic_field({10, 10, 10}, 9);
  Tensor3 mask = sample_mask({10, 10, 10}, {0.4, 4});
  ObservationSet obs = observe(field, mask, {0.3, 6});
  TuckerAlsConfig cfg;
  cfg.core_dims = {3, 3, 3};
  cfg.max_sweeps = 30;
  cfg.tol = 0.0;
  cfg.seed = 5;
  TuckerAlsResult res = tucker_als_complete(obs, cfg);
  REQUIRE(res.residual_history.size() >= 2);
  for (std::size_t s = 1; s < res.residual_history.size(); ++s)
    CHECK(res.residual_history[s] <=
          res.residual_history[s - 1] * (1.0 + 1e-12) + 1e-12);
}

TEST_CASE("tucker-als freezes factor rows for empty slices and warns") {
  Tensor3 field = synthetic_field({6, 6, 6}, 10);
  Tensor3 mask(6, 6, 6);
  // observe everything except mode-1 slice 0
  for (int z = 0; z < 6; ++z)
    for (int y = 0; y < 6; ++y)
      for (int i = 1; i < 6; ++i) mask(i, y, z) = 1.0;
  ObservationSet obs = observe(field, mask, {0.0, 0});
  TuckerAlsConfig cfg;
  cfg.core_dims = {2, 2, 2};
  cfg.max_sweeps = 10;
  cfg.seed = 3;
  TuckerAlsResult res = tucker_als_complete(obs, cfg);
  REQUIRE(!res.warnings.empty());
  CHECK(res.warnings[0].find("mode-1") != std::string::npos);
}

TEST_CASE("tucker-als validates its configuration") {
  Tensor3 field(4, 4, 4, 1.0);
  ObservationSet obs = observe_all(field);
  TuckerAlsConfig cfg;
  cfg.core_dims = {5, 2, 2};  // exceeds the field dimension
  CHECK_THROWS_AS(tucker_als_complete(obs, cfg), ShapeError);
}
