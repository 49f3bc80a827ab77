#include "tensorfield/model.hpp"

#include <cmath>

#include "tensorfield/kernels.hpp"
#include "tensorfield/rng.hpp"
#include "tensorfield/tensor_ops.hpp"

namespace tensorfield {

std::string to_string(const Activation& a) {
  switch (a.kind) {
    case ActKind::relu:
      return "relu";
    case ActKind::tanh_fn:
      return "tanh";
    case ActKind::linear:
      return a.scale == 1.0 ? "linear" : "linear:" + std::to_string(a.scale);
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu();
  if (s == "tanh") return Activation::tanh();
  if (s == "linear") return Activation::linear(1.0);
  if (s.rfind("linear:", 0) == 0) {
    std::size_t pos = 0;
    double a = std::stod(s.substr(7), &pos);
    if (pos == s.size() - 7) return Activation::linear(a);
  }
  throw std::invalid_argument("unknown activation '" + s + "'");
}

std::array<int, 3> ModelConfig::output_dims() const {
  if (layers.empty()) return core_dims;
  return layers.back().out_dims;
}

void ModelConfig::validate() const {
  for (int d : core_dims)
    if (d < 1) throw ShapeError("core dims must be >= 1, got " + shape_str(core_dims));
  if (layers.empty()) throw ShapeError("model needs at least one layer");
  for (const auto& l : layers)
    for (int d : l.out_dims)
      if (d < 1) throw ShapeError("layer dims must be >= 1, got " + shape_str(l.out_dims));
}

ModelConfig default_model_config(std::array<int, 3> field_shape) {
  ModelConfig cfg;
  cfg.core_dims = {5, 5, 5};
  cfg.layers = {{{10, 10, 10}, Activation::relu()},
                {field_shape, Activation::tanh()}};
  return cfg;
}

void TnnParams::validate_against(const ModelConfig& config) const {
  config.validate();
  if (core.shape() != config.core_dims)
    throw ShapeError("params core shape " + shape_str(core.shape()) +
                     " != config core dims " + shape_str(config.core_dims));
  if (factors.size() != config.layers.size())
    throw ShapeError("params have " + std::to_string(factors.size()) +
                     " layers, config wants " + std::to_string(config.layers.size()));
  std::array<int, 3> in = config.core_dims;
  for (std::size_t l = 0; l < factors.size(); ++l) {
    const auto& out = config.layers[l].out_dims;
    for (int i = 0; i < 3; ++i) {
      const Matrix& w = factors[l][i];
      if (w.rows() != out[i] || w.cols() != in[i])
        throw ShapeError("layer " + std::to_string(l + 1) + " factor " +
                         std::to_string(i + 1) + " is " + std::to_string(w.rows()) +
                         "x" + std::to_string(w.cols()) + ", expected " +
                         std::to_string(out[i]) + "x" + std::to_string(in[i]));
    }
    in = out;
  }
}

std::int64_t TnnParams::scalar_count() const {
  std::int64_t n = static_cast<std::int64_t>(core.size());
  for (const auto& trio : factors)
    for (const auto& w : trio) n += static_cast<std::int64_t>(w.size());
  return n;
}

Tensor3 tcl_forward(const Tensor3& x, const Matrix& w1, const Matrix& w2,
                    const Matrix& w3, const Activation& act) {
  Tensor3 out = tucker_compose(x, w1, w2, w3);
  apply_activation(act, out);
  return out;
}

Tensor3 tnn_forward(const TnnParams& params, const ModelConfig& config) {
  params.validate_against(config);
  Tensor3 x = params.core;
  for (std::size_t l = 0; l < config.layers.size(); ++l)
    x = tcl_forward(x, params.factors[l][0], params.factors[l][1],
                    params.factors[l][2], config.layers[l].act);
  return x;
}

TuckerFactors collapse_linear_tnn(const TnnParams& params,
                                  const ModelConfig& config) {
  params.validate_against(config);
  double scale = 1.0;
  for (const auto& l : config.layers) {
    if (!l.act.is_linear())
      throw std::invalid_argument(
          "collapse_linear_tnn: non-linear activation '" + to_string(l.act) +
          "' present");
    scale *= l.act.scale;
  }
  TuckerFactors out;
  out.u1 = params.factors[0][0];
  out.u2 = params.factors[0][1];
  out.u3 = params.factors[0][2];
  for (std::size_t l = 1; l < params.factors.size(); ++l) {
    out.u1 = matmul(params.factors[l][0], out.u1);
    out.u2 = matmul(params.factors[l][1], out.u2);
    out.u3 = matmul(params.factors[l][2], out.u3);
  }
  out.core = params.core;
  kernels::active().scale(out.core.data(), scale, out.core.data(),
                          out.core.size());
  return out;
}

std::int64_t param_count(const ModelConfig& config) {
  config.validate();
  std::int64_t n = static_cast<std::int64_t>(config.core_dims[0]) *
                   config.core_dims[1] * config.core_dims[2];
  std::array<int, 3> in = config.core_dims;
  for (const auto& l : config.layers) {
    for (int i = 0; i < 3; ++i)
      n += static_cast<std::int64_t>(l.out_dims[i]) * in[i];
    in = l.out_dims;
  }
  return n;
}

TnnParams init_params(const ModelConfig& config, std::uint64_t seed,
                      InitScheme scheme) {
  config.validate();
  (void)scheme;  // single scheme for now
  Rng rng(seed);
  TnnParams p;
  p.core = Tensor3(config.core_dims);
  for (double& v : p.core.values()) v = rng.gaussian(0.1);
  std::array<int, 3> in = config.core_dims;
  for (const auto& l : config.layers) {
    std::array<Matrix, 3> trio;
    for (int i = 0; i < 3; ++i) {
      const int fan_in = in[i], fan_out = l.out_dims[i];
      const double s = std::sqrt(6.0 / (fan_in + fan_out));
      Matrix w(fan_out, fan_in);
      for (int r = 0; r < w.rows(); ++r)
        for (int c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-s, s);
      trio[i] = std::move(w);
    }
    p.factors.push_back(std::move(trio));
    in = l.out_dims;
  }
  return p;
}

void apply_activation(const Activation& act, Tensor3& x) {
  const auto& k = kernels::active();
  switch (act.kind) {
    case ActKind::relu:
      k.relu(x.data(), x.data(), x.size());
      return;
    case ActKind::tanh_fn:
      for (double& v : x.values()) v = std::tanh(v);
      return;
    case ActKind::linear:
      if (act.scale != 1.0) k.scale(x.data(), act.scale, x.data(), x.size());
      return;
  }
}

void activation_backward(const Activation& act, const Tensor3& layer_output,
                         Tensor3& upstream) {
  const auto& k = kernels::active();
  switch (act.kind) {
    case ActKind::relu:
      // y > 0 iff the pre-activation was > 0; derivative at 0 taken as 0
      k.relu_mask(layer_output.data(), upstream.data(), upstream.data(),
                  upstream.size());
      return;
    case ActKind::tanh_fn: {
      const double* y = layer_output.data();
      double* u = upstream.data();
      for (std::size_t i = 0; i < upstream.size(); ++i)
        u[i] *= 1.0 - y[i] * y[i];
      return;
    }
    case ActKind::linear:
      if (act.scale != 1.0)
        k.scale(upstream.data(), act.scale, upstream.data(), upstream.size());
      return;
  }
}

}  // namespace tensorfield
