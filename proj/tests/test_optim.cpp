#include "tensorfield/optim.hpp"

#include "doctest.h"
#include "test_util.hpp"

using namespace tensorfield;
using namespace tftest;

namespace {

ModelConfig scalar_model() {
  ModelConfig cfg;
  cfg.core_dims = {1, 1, 1};
  cfg.layers = {{{1, 1, 1}, Activation::linear(1.0)}};
  return cfg;
}

TnnParams scalar_params(double core, double w) {
  TnnParams p;
  p.core = Tensor3(1, 1, 1, core);
  p.factors.push_back({Matrix(1, 1, w), Matrix(1, 1, w), Matrix(1, 1, w)});
  return p;
}

GradientSet zeros_like(const TnnParams& p) {
  GradientSet g;
  g.d_core = Tensor3(p.core.shape());
  for (const auto& trio : p.factors)
    g.d_factors.push_back({Matrix(trio[0].rows(), trio[0].cols()),
                           Matrix(trio[1].rows(), trio[1].cols()),
                           Matrix(trio[2].rows(), trio[2].cols())});
  return g;
}

}  // namespace

TEST_CASE("gd step arithmetic") {
  TnnParams p = scalar_params(1.0, 1.0);
  GradientSet g = zeros_like(p);

  SUBCASE("zero gradients leave params unchanged") {
    TnnParams before = p;
    gd_step(p, g, 0.5);
    CHECK(p.core == before.core);
    CHECK(p.factors[0][0] == before.factors[0][0]);
  }

  SUBCASE("theta=1, g=2, eta=0.5 lands on zero") {
    g.d_core = Tensor3(1, 1, 1, 2.0);
    gd_step(p, g, 0.5);
    CHECK(p.core(0, 0, 0) == 0.0);
  }

  SUBCASE("two steps with gradient g equal one step with 2g") {
    g.d_core = Tensor3(1, 1, 1, 0.3);
    TnnParams q = p;
    gd_step(p, g, 0.1);
    gd_step(p, g, 0.1);
    GradientSet g2 = zeros_like(q);
    g2.d_core = Tensor3(1, 1, 1, 0.6);
    gd_step(q, g2, 0.1);
    CHECK(p.core(0, 0, 0) == doctest::Approx(q.core(0, 0, 0)).epsilon(1e-15));
  }
}

TEST_CASE("first adam step moves by about the learning rate against the gradient") {
  OptimizerConfig opt;
  opt.learning_rate = 0.005;
  TnnParams p = scalar_params(1.0, 1.0);
  AdamState st = AdamState::zeros_like(p);
  GradientSet g = zeros_like(p);
  const double gval = 0.37;
  g.d_core = Tensor3(1, 1, 1, gval);
  const double before = p.core(0, 0, 0);
  adam_step(st, p, g, opt, 1);
  const double update = before - p.core(0, 0, 0);
  // t=1 bias correction collapses to g/(|g| + eps)
  const double expect = opt.learning_rate * gval / (gval + opt.epsilon);
  CHECK(update == doctest::Approx(expect).epsilon(1e-6));
  CHECK(update > 0.0);  // opposes the positive gradient
  CHECK(std::abs(update - opt.learning_rate) < 1e-6 * opt.learning_rate + 1e-9);
}

TEST_CASE("adam with zero gradients never moves") {
  OptimizerConfig opt;
  TnnParams p = scalar_params(0.7, -0.2);
  AdamState st = AdamState::zeros_like(p);
  GradientSet g = zeros_like(p);
  for (int t = 1; t <= 25; ++t) adam_step(st, p, g, opt, t);
  CHECK(p.core(0, 0, 0) == 0.7);
  CHECK(p.factors[0][0](0, 0) == -0.2);
}

TEST_CASE("fit stops immediately under a huge threshold") {
  ModelConfig cfg = scalar_model();
  Tensor3 y(1, 1, 1, 3.0);
  Tensor3 o(1, 1, 1, 1.0);
  OptimizerConfig opt;
  opt.max_iters = 1000;
  opt.stop_threshold = 1e12;
  FitResult res = fit(scalar_params(0.1, 1.0), cfg, y, o, LossSpec{}, opt);
  CHECK(res.trace.iterations == 1);
  CHECK(res.trace.reason == StopReason::threshold);
}

TEST_CASE("fit runs exactly max_iters when the threshold is zero") {
  ModelConfig cfg = scalar_model();
  Tensor3 y(1, 1, 1, 3.0);
  Tensor3 o(1, 1, 1, 1.0);
  OptimizerConfig opt;
  opt.max_iters = 10;
  opt.stop_threshold = 0.0;
  FitResult res = fit(scalar_params(0.1, 1.0), cfg, y, o, LossSpec{}, opt);
  CHECK(res.trace.iterations == 10);
  CHECK(res.trace.reason == StopReason::max_iters);
}

TEST_CASE("fit converges on a fully observed representable field") {
  ModelConfig cfg;
  cfg.core_dims = {3, 3, 3};
  cfg.layers = {{{6, 6, 6}, Activation::relu()}, {{8, 8, 8}, Activation::tanh()}};
  TnnParams truth = init_params(cfg, 77);
  Tensor3 y = tnn_forward(truth, cfg);
  Tensor3 o(8, 8, 8, 1.0);
  OptimizerConfig opt;  // adam, lr 0.005, 15000 iters
  FitResult res = fit(init_params(cfg, 1), cfg, y, o, LossSpec{}, opt);
  CHECK(res.trace.final_loss < 1e-2 * frobenius_norm_sq(y));
}

TEST_CASE("plain gd with a small step never increases the loss on a linear model") {
  ModelConfig cfg;
  cfg.core_dims = {2, 2, 2};
  cfg.layers = {{{4, 4, 4}, Activation::linear(1.0)}};
  Rng rng(41);
  Tensor3 y = random_tensor({4, 4, 4}, rng);
  Tensor3 o(4, 4, 4, 1.0);
  OptimizerConfig opt;
  opt.method = OptimMethod::gd;
  opt.learning_rate = 1e-4;
  opt.max_iters = 100;
  opt.record_stride = 1;
  FitResult res = fit(init_params(cfg, 4), cfg, y, o, LossSpec{}, opt);
  REQUIRE(res.trace.entries.size() == 100);
  for (std::size_t i = 1; i < res.trace.entries.size(); ++i)
    CHECK(res.trace.entries[i].loss <= res.trace.entries[i - 1].loss);
}

TEST_CASE("fit traces are bit-identical across runs") {
  ModelConfig cfg;
  cfg.core_dims = {2, 2, 2};
  cfg.layers = {{{5, 5, 5}, Activation::relu()}, {{6, 6, 6}, Activation::tanh()}};
  Rng rng(42);
  Tensor3 y = random_tensor({6, 6, 6}, rng);
  Tensor3 o(6, 6, 6, 1.0);
  OptimizerConfig opt;
  opt.max_iters = 300;

  FitResult a = fit(init_params(cfg, 3), cfg, y, o, LossSpec{}, opt);
  FitResult b = fit(init_params(cfg, 3), cfg, y, o, LossSpec{}, opt);
  REQUIRE(a.trace.entries.size() == b.trace.entries.size());
  for (std::size_t i = 0; i < a.trace.entries.size(); ++i) {
    CHECK(a.trace.entries[i].iter == b.trace.entries[i].iter);
    CHECK(a.trace.entries[i].loss == b.trace.entries[i].loss);
  }
  CHECK(a.trace.final_loss == b.trace.final_loss);
  CHECK(a.params.core == b.params.core);
}

TEST_CASE("optimizer config validation") {
  OptimizerConfig opt;
  opt.learning_rate = 0.0;
  CHECK_THROWS_AS(opt.validate(), std::invalid_argument);
  opt = OptimizerConfig{};
  opt.max_iters = 0;
  CHECK_THROWS_AS(opt.validate(), std::invalid_argument);
  opt = OptimizerConfig{};
  opt.stop_threshold = -1.0;
  CHECK_THROWS_AS(opt.validate(), std::invalid_argument);
}
