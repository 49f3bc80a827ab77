#pragma once

#include <utility>

#include "tensorfield/model.hpp"
#include "tensorfield/tensor3.hpp"

namespace tensorfield {

enum class Regularizer { none, tv };

struct LossSpec {
  double lambda = 0.0;
  Regularizer reg = Regularizer::none;

  void validate() const;  // lambda finite and >= 0
};

/// Gradients shaped like their TnnParams.
struct GradientSet {
  Tensor3 d_core;
  std::vector<std::array<Matrix, 3>> d_factors;
};

/// Masked least-squares objective ||y - o*x||_F^2 (+ lambda*tv on the full
/// model output when selected), with x the model forward pass.
double loss(const TnnParams& params, const ModelConfig& config,
            const Tensor3& y, const Tensor3& o, const LossSpec& spec);

/// Anisotropic total variation: sum of |forward difference| along each mode;
/// out-of-range differences omitted.
double tv(const Tensor3& x);

/// Subgradient of tv: sign of each in-range difference accumulated to both
/// endpoints with opposite signs (sign(0) = 0).
Tensor3 tv_subgradient(const Tensor3& x);

/// Analytic reverse-mode gradients of loss() with respect to every parameter.
/// The returned loss is computed on the same forward pass loss() uses.
std::pair<double, GradientSet> backward(const TnnParams& params,
                                        const ModelConfig& config,
                                        const Tensor3& y, const Tensor3& o,
                                        const LossSpec& spec);

}  // namespace tensorfield
