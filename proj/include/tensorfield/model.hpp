#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tensorfield/tensor3.hpp"

namespace tensorfield {

enum class ActKind { relu, tanh_fn, linear };

/// Elementwise layer activation; linear carries a scale a (linear(1) == id).
struct Activation {
  ActKind kind = ActKind::linear;
  double scale = 1.0;  // only meaningful for linear

  static Activation relu() { return {ActKind::relu, 1.0}; }
  static Activation tanh() { return {ActKind::tanh_fn, 1.0}; }
  static Activation linear(double a = 1.0) { return {ActKind::linear, a}; }

  bool is_linear() const { return kind == ActKind::linear; }
};

std::string to_string(const Activation& a);
Activation activation_from_string(const std::string& s);

struct LayerSpec {
  std::array<int, 3> out_dims;
  Activation act;
};

/// Architecture of a stacked-contraction-layer model: a learned core tensor
/// of core_dims contracted through `layers`, the last of which produces the
/// field shape.
struct ModelConfig {
  std::array<int, 3> core_dims{5, 5, 5};
  std::vector<LayerSpec> layers;

  std::array<int, 3> output_dims() const;
  void validate() const;  // dims >= 1, at least one layer
};

/// Default architecture: core (5,5,5) -> (10,10,10) relu -> (20,20,20) tanh.
ModelConfig default_model_config(std::array<int, 3> field_shape = {20, 20, 20});

/// Parameter set: core tensor plus one factor-matrix triple per layer,
/// factors[l][i] of shape (R_i^{l+1} x R_i^l).
struct TnnParams {
  Tensor3 core;
  std::vector<std::array<Matrix, 3>> factors;

  void validate_against(const ModelConfig& config) const;
  std::int64_t scalar_count() const;
};

/// One tensor contraction layer: act applied to x x_1 w1 x_2 w2 x_3 w3.
Tensor3 tcl_forward(const Tensor3& x, const Matrix& w1, const Matrix& w2,
                    const Matrix& w3, const Activation& act);

/// Full forward pass from the core to the output shape.
Tensor3 tnn_forward(const TnnParams& params, const ModelConfig& config);

struct TuckerFactors {
  Tensor3 core;
  Matrix u1, u2, u3;
};

/// For an all-linear model, the equivalent single Tucker composition:
/// core scaled by the product of the layer scales, factors multiplied
/// last-to-first per mode. Throws if any activation is non-linear.
TuckerFactors collapse_linear_tnn(const TnnParams& params,
                                  const ModelConfig& config);

/// Number of scalars: core volume plus sum over layers of R_i^{l+1}*R_i^l.
std::int64_t param_count(const ModelConfig& config);

enum class InitScheme { glorot };

/// Deterministic init: factors i.i.d. uniform(-s, s) with
/// s = sqrt(6/(fan_in+fan_out)); core i.i.d. normal with std 0.1.
TnnParams init_params(const ModelConfig& config, std::uint64_t seed,
                      InitScheme scheme = InitScheme::glorot);

// Elementwise activation application / derivative (from the activation
// *output* y; valid for all supported kinds).
void apply_activation(const Activation& act, Tensor3& x);
void activation_backward(const Activation& act, const Tensor3& layer_output,
                         Tensor3& upstream);

}  // namespace tensorfield
