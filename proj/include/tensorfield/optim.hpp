#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tensorfield/grad.hpp"
#include "tensorfield/model.hpp"

namespace tensorfield {

enum class OptimMethod { gd, adam };

struct OptimizerConfig {
  OptimMethod method = OptimMethod::adam;
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t max_iters = 15000;
  double stop_threshold = 0.0;  // 0: run max_iters
  std::int64_t record_stride = 50;

  void validate() const;
};

enum class StopReason { max_iters, threshold };

struct TraceEntry {
  std::int64_t iter;
  double loss;
};

struct TrainTrace {
  std::vector<TraceEntry> entries;
  std::int64_t iterations = 0;
  StopReason reason = StopReason::max_iters;
  double final_loss = 0.0;
};

/// Plain gradient step theta <- theta - eta * grad.
void gd_step(TnnParams& params, const GradientSet& grads, double eta);

/// First/second moment accumulators, shaped like their TnnParams.
struct AdamState {
  Tensor3 m_core, v_core;
  std::vector<std::array<Matrix, 3>> m_factors, v_factors;

  static AdamState zeros_like(const TnnParams& params);
};

/// Standard bias-corrected Adam update; t is the 1-based step index.
void adam_step(AdamState& state, TnnParams& params, const GradientSet& grads,
               const OptimizerConfig& opt, std::int64_t t);

struct FitResult {
  TnnParams params;
  TrainTrace trace;
};

/// Training loop: repeat {backward, step} until max_iters, or until the
/// absolute loss change drops to stop_threshold. Aborts with NumericError
/// naming the iteration if the loss goes non-finite.
FitResult fit(TnnParams params, const ModelConfig& config, const Tensor3& y,
              const Tensor3& o, const LossSpec& loss_spec,
              const OptimizerConfig& opt);

std::string to_string(StopReason r);

}  // namespace tensorfield
