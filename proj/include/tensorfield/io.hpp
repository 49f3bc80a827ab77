#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tensorfield/baselines.hpp"
#include "tensorfield/grad.hpp"
#include "tensorfield/model.hpp"
#include "tensorfield/optim.hpp"
#include "tensorfield/recon.hpp"

namespace tensorfield {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid files: header "ssfgrid v1 I J K" followed by I*J*K whitespace-
// separated values in canonical order (mode-1 index fastest), printed with
// 17 significant digits so round trips are bit-exact for finite doubles.
// Mask files use the header tag "ssfmask v1" and 0/1 values only.
void write_grid(const std::filesystem::path& path, const Tensor3& t);
Tensor3 read_grid(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const Tensor3& mask);
Tensor3 read_mask(const std::filesystem::path& path);

std::string format_double(double v);  // %.17g
double parse_double(const std::string& s);

/// Field source for commands that need ground truth: either a grid file or
/// a seeded synthetic field.
struct FieldSource {
  std::string grid_path;  // empty -> synthesize
  std::uint64_t synth_seed = 7;
  std::array<int, 3> shape{20, 20, 20};

  Tensor3 load() const;
};

/// Everything a run can configure, parsed from a flat key-value file with
/// dotted sections ("model.core_dims = 5 5 5"). Unknown keys are hard errors.
struct RunConfig {
  ModelConfig model = default_model_config();
  std::uint64_t init_seed = 1;
  OptimizerConfig optimizer;
  LossSpec loss;
  SamplingSpec sampling;
  NoiseSpec noise;
  FieldSource field;
  TuckerAlsConfig tucker;
  GreenFn spline_green = GreenFn::distance;
  double spline_ridge = kSplineRidgeDefault;

  // sweep grid
  std::vector<std::string> sweep_methods{"tnn", "tucker_als"};
  std::vector<double> sweep_rhos{0.1, 0.2, 0.4};
  std::vector<double> sweep_sigmas{0.1};
  std::vector<std::uint64_t> sweep_seeds{1, 2, 3};
};

RunConfig parse_run_config(const std::filesystem::path& path);
RunConfig parse_run_config_text(const std::string& text);

/// One-line echo of the model/optimizer/loss portion of a config.
std::string config_echo(const ModelConfig& model, const OptimizerConfig& opt,
                        const LossSpec& loss);

/// Serialization of a ModelConfig in the config-file grammar.
std::string model_config_to_text(const ModelConfig& model);

}  // namespace tensorfield
