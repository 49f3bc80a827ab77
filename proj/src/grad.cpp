#include "tensorfield/grad.hpp"

#include <cmath>

#include "tensorfield/kernels.hpp"
#include "tensorfield/tensor_ops.hpp"

namespace tensorfield {

void LossSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("loss: lambda must be finite and >= 0, got " +
                                std::to_string(lambda));
}

double tv(const Tensor3& x) {
  const auto [di, dj, dk] = x.shape();
  double acc = 0.0;
  for (int z = 0; z < dk; ++z)
    for (int y = 0; y < dj; ++y)
      for (int i = 0; i + 1 < di; ++i) acc += std::abs(x(i + 1, y, z) - x(i, y, z));
  for (int z = 0; z < dk; ++z)
    for (int y = 0; y + 1 < dj; ++y)
      for (int i = 0; i < di; ++i) acc += std::abs(x(i, y + 1, z) - x(i, y, z));
  for (int z = 0; z + 1 < dk; ++z)
    for (int y = 0; y < dj; ++y)
      for (int i = 0; i < di; ++i) acc += std::abs(x(i, y, z + 1) - x(i, y, z));
  return acc;
}

namespace {

inline double sign(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

}  // namespace

Tensor3 tv_subgradient(const Tensor3& x) {
  const auto [di, dj, dk] = x.shape();
  Tensor3 g(x.shape());
  for (int z = 0; z < dk; ++z)
    for (int y = 0; y < dj; ++y)
      for (int i = 0; i + 1 < di; ++i) {
        const double s = sign(x(i + 1, y, z) - x(i, y, z));
        g(i + 1, y, z) += s;
        g(i, y, z) -= s;
      }
  for (int z = 0; z < dk; ++z)
    for (int y = 0; y + 1 < dj; ++y)
      for (int i = 0; i < di; ++i) {
        const double s = sign(x(i, y + 1, z) - x(i, y, z));
        g(i, y + 1, z) += s;
        g(i, y, z) -= s;
      }
  for (int z = 0; z + 1 < dk; ++z)
    for (int y = 0; y < dj; ++y)
      for (int i = 0; i < di; ++i) {
        const double s = sign(x(i, y, z + 1) - x(i, y, z));
        g(i, y, z + 1) += s;
        g(i, y, z) -= s;
      }
  return g;
}

namespace {

void check_loss_inputs(const ModelConfig& config, const Tensor3& y,
                       const Tensor3& o) {
  if (!y.same_shape(o))
    throw ShapeError("loss: y shape " + shape_str(y.shape()) + " vs mask " +
                     shape_str(o.shape()));
  if (y.shape() != config.output_dims())
    throw ShapeError("loss: data shape " + shape_str(y.shape()) +
                     " vs model output " + shape_str(config.output_dims()));
}

// Objective computed from a forward output; shared by loss() and backward()
// so both report identical values.
double loss_from_output(const Tensor3& x, const Tensor3& y, const Tensor3& o,
                        const LossSpec& spec, Tensor3* residual_out) {
  const auto& k = kernels::active();
  Tensor3 r(y.shape());
  k.masked_residual(y.data(), o.data(), x.data(), r.data(), r.size());
  double f = k.sum_sq(r.data(), r.size());
  if (spec.reg == Regularizer::tv && spec.lambda != 0.0) f += spec.lambda * tv(x);
  if (residual_out) *residual_out = std::move(r);
  return f;
}

}  // namespace

double loss(const TnnParams& params, const ModelConfig& config,
            const Tensor3& y, const Tensor3& o, const LossSpec& spec) {
  spec.validate();
  check_loss_inputs(config, y, o);
  Tensor3 x = tnn_forward(params, config);
  return loss_from_output(x, y, o, spec, nullptr);
}

// Reverse mode through the stacked contraction layers. With z the
// pre-activation of layer l and delta = dL/d(layer output) after the
// activation derivative:
//   dL/dW^(i)  = unfold_i(delta) * unfold_i(x_{l-1} contracted over the
//                other two modes)^T
//   dL/dx_{l-1} = delta x_1 W1^T x_2 W2^T x_3 W3^T
std::pair<double, GradientSet> backward(const TnnParams& params,
                                        const ModelConfig& config,
                                        const Tensor3& y, const Tensor3& o,
                                        const LossSpec& spec) {
  spec.validate();
  check_loss_inputs(config, y, o);
  params.validate_against(config);
  const auto& k = kernels::active();
  const std::size_t num_layers = config.layers.size();

  // forward, caching every layer output (x[0] is the core)
  std::vector<Tensor3> cache(num_layers + 1);
  cache[0] = params.core;
  for (std::size_t l = 0; l < num_layers; ++l)
    cache[l + 1] = tcl_forward(cache[l], params.factors[l][0],
                               params.factors[l][1], params.factors[l][2],
                               config.layers[l].act);

  Tensor3 residual;
  const double f = loss_from_output(cache[num_layers], y, o, spec, &residual);

  // dL/dx for the data term: 2 * o * (o*x - y) = -2 * o * residual
  Tensor3 delta(residual.shape());
  k.mul(residual.data(), o.data(), delta.data(), delta.size());
  k.scale(delta.data(), -2.0, delta.data(), delta.size());
  if (spec.reg == Regularizer::tv && spec.lambda != 0.0) {
    Tensor3 tvg = tv_subgradient(cache[num_layers]);
    k.axpy(spec.lambda, tvg.data(), delta.data(), delta.size());
  }

  GradientSet grads;
  grads.d_factors.resize(num_layers);
  for (std::size_t li = num_layers; li-- > 0;) {
    const auto& act = config.layers[li].act;
    const Matrix& w1 = params.factors[li][0];
    const Matrix& w2 = params.factors[li][1];
    const Matrix& w3 = params.factors[li][2];
    const Tensor3& input = cache[li];

    activation_backward(act, cache[li + 1], delta);  // now dL/d(pre-activation)

    // factor gradients via the three partial contractions of the layer input
    Tensor3 p1 = mode_n_product(mode_n_product(input, w2, 2), w3, 3);
    Tensor3 p2 = mode_n_product(mode_n_product(input, w1, 1), w3, 3);
    Tensor3 p3 = mode_n_product(mode_n_product(input, w1, 1), w2, 2);
    for (int mode = 1; mode <= 3; ++mode) {
      const Tensor3& partial = mode == 1 ? p1 : (mode == 2 ? p2 : p3);
      Matrix du = mode_n_unfold(delta, mode);
      Matrix pu = mode_n_unfold(partial, mode);
      Matrix g(du.rows(), pu.rows());
      k.gemm_nt(du.data(), pu.data(), g.data(), du.rows(), du.cols(), pu.rows());
      grads.d_factors[li][mode - 1] = std::move(g);
    }

    // input adjoint
    delta = mode_n_product(
        mode_n_product(mode_n_product(delta, transpose(w1), 1), transpose(w2), 2),
        transpose(w3), 3);
  }
  grads.d_core = std::move(delta);
  return {f, std::move(grads)};
}

}  // namespace tensorfield
