#include "tensorfield/io.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "test_util.hpp"

using namespace tensorfield;
using namespace tftest;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("tensorfield_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path file(const std::string& name) const { return path / name; }
};

}  // namespace

TEST_CASE("grid files round trip bit-exactly") {
  TempDir tmp;
  Rng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    Tensor3 t = random_tensor({3, 4, 5}, rng, std::pow(10.0, trial - 5));
    t.data()[0] = 1540.123456789;
    const auto p = tmp.file("grid_" + std::to_string(trial) + ".grid");
    write_grid(p, t);
    CHECK(read_grid(p) == t);
  }
}

TEST_CASE("grid reader rejects malformed files") {
  TempDir tmp;
  auto write_text = [&](const std::string& name, const std::string& text) {
    std::ofstream out(tmp.file(name));
    out << text;
    return tmp.file(name);
  };
  CHECK_THROWS_AS(read_grid(tmp.file("missing.grid")), IoError);
  CHECK_THROWS_AS(read_grid(write_text("bad1", "nope v1 2 2 2\n1 2 3 4 5 6 7 8\n")), IoError);
  CHECK_THROWS_AS(read_grid(write_text("bad2", "ssfgrid v2 2 2 2\n1 2 3 4 5 6 7 8\n")), IoError);
  CHECK_THROWS_AS(read_grid(write_text("bad3", "ssfgrid v1 2 2 2\n1 2 3\n")), IoError);
  CHECK_THROWS_AS(read_grid(write_text("bad4", "ssfgrid v1 2 2 2\n1 2 3 4 5 6 7 8 9\n")), IoError);
  CHECK_THROWS_AS(read_grid(write_text("bad5", "ssfgrid v1 2 2 2\n1 2 3 4 5 6 7 x\n")), IoError);
}

TEST_CASE("mask files enforce binary values") {
  TempDir tmp;
  Tensor3 mask = sample_mask({4, 4, 4}, {0.5, 1});
  write_mask(tmp.file("m.mask"), mask);
  CHECK(read_mask(tmp.file("m.mask")) == mask);

  Tensor3 bad(2, 2, 2, 0.5);
  CHECK_THROWS_AS(write_mask(tmp.file("bad.mask"), bad), IoError);

  std::ofstream out(tmp.file("bad2.mask"));
  out << "ssfmask v1 1 1 2\n1 0.5\n";
  out.close();
  CHECK_THROWS_AS(read_mask(tmp.file("bad2.mask")), IoError);

  // grid/mask tags are not interchangeable
  write_grid(tmp.file("g.grid"), Tensor3(2, 2, 2, 1.0));
  CHECK_THROWS_AS(read_mask(tmp.file("g.grid")), IoError);
}

TEST_CASE("config defaults match the documented model") {
  RunConfig cfg = parse_run_config_text("");
  CHECK(param_count(cfg.model) == 875);
  CHECK(cfg.model.layers.size() == 2);
  CHECK(cfg.model.layers[0].act.kind == ActKind::relu);
  CHECK(cfg.model.layers[1].act.kind == ActKind::tanh_fn);
  CHECK(cfg.optimizer.learning_rate == 0.005);
  CHECK(cfg.optimizer.max_iters == 15000);
  CHECK(cfg.optimizer.method == OptimMethod::adam);
  CHECK(cfg.loss.lambda == 0.0);
}

TEST_CASE("config parses sections, lists and comments") {
  const std::string text = R"(
# run setup
model.core_dims = 3 3 3
model.layer1.dims = 6 6 6
model.layer1.activation = relu
model.layer2.dims = 8 8 8
model.layer2.activation = tanh
init.seed = 42

optimizer.method = gd
optimizer.learning_rate = 0.25   # keep it large
optimizer.max_iters = 12
loss.lambda = 0.3
loss.regularizer = tv
sampling.rho = 0.35
noise.sigma = 0.2
sweep.methods = tnn spline
sweep.rhos = 0.1 0.3
sweep.seeds = 4 5 6
)";
  RunConfig cfg = parse_run_config_text(text);
  CHECK(cfg.model.core_dims == std::array<int, 3>{3, 3, 3});
  REQUIRE(cfg.model.layers.size() == 2);
  CHECK(cfg.model.layers[1].out_dims == std::array<int, 3>{8, 8, 8});
  CHECK(cfg.init_seed == 42);
  CHECK(cfg.optimizer.method == OptimMethod::gd);
  CHECK(cfg.optimizer.learning_rate == 0.25);
  CHECK(cfg.optimizer.max_iters == 12);
  CHECK(cfg.loss.lambda == 0.3);
  CHECK(cfg.loss.reg == Regularizer::tv);
  CHECK(cfg.sampling.rho == 0.35);
  CHECK(cfg.noise.sigma == 0.2);
  CHECK(cfg.sweep_methods == std::vector<std::string>{"tnn", "spline"});
  CHECK(cfg.sweep_rhos == std::vector<double>{0.1, 0.3});
  CHECK(cfg.sweep_seeds == std::vector<std::uint64_t>{4, 5, 6});
}

TEST_CASE("config rejects unknown and duplicate keys") {
  CHECK_THROWS_WITH_AS(parse_run_config_text("model.coredims = 5 5 5\n"),
                       doctest::Contains("unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config_text("noise.sigma = 1\nnoise.sigma = 2\n"),
                       doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("loss.regularizer = ridge\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("model.core_dims = 1 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("just a line\n"), ConfigError);
  // layer keys must be contiguous from 1
  CHECK_THROWS_AS(
      parse_run_config_text("model.core_dims = 2 2 2\nmodel.layer2.dims = 4 4 4\n"),
      ConfigError);
}

TEST_CASE("model config serialization round trips through the parser") {
  ModelConfig m;
  m.core_dims = {4, 5, 6};
  m.layers = {{{8, 9, 10}, Activation::relu()},
              {{12, 12, 12}, Activation::linear(0.5)}};
  RunConfig cfg = parse_run_config_text(model_config_to_text(m));
  CHECK(cfg.model.core_dims == m.core_dims);
  REQUIRE(cfg.model.layers.size() == 2);
  CHECK(cfg.model.layers[0].out_dims == m.layers[0].out_dims);
  CHECK(cfg.model.layers[1].act.kind == ActKind::linear);
  CHECK(cfg.model.layers[1].act.scale == 0.5);
}

TEST_CASE("format_double survives a round trip at full precision") {
  Rng rng(72);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.gaussian() * std::pow(10.0, static_cast<int>(rng.below(20)) - 10);
    CHECK(parse_double(format_double(v)) == v);
  }
}
