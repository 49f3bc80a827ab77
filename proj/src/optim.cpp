#include "tensorfield/optim.hpp"

#include <cmath>

#include "tensorfield/kernels.hpp"

namespace tensorfield {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("optimizer: learning_rate must be > 0");
  if (max_iters < 1) throw std::invalid_argument("optimizer: max_iters must be >= 1");
  if (!(stop_threshold >= 0.0)) throw std::invalid_argument("optimizer: stop_threshold must be >= 0");
  if (record_stride < 1) throw std::invalid_argument("optimizer: record_stride must be >= 1");
}

std::string to_string(StopReason r) {
  return r == StopReason::max_iters ? "max_iters" : "threshold";
}

namespace {

template <typename Fn>
void for_each_block(TnnParams& p, const GradientSet& g, Fn&& fn) {
  fn(p.core.data(), g.d_core.data(), p.core.size());
  for (std::size_t l = 0; l < p.factors.size(); ++l)
    for (int i = 0; i < 3; ++i)
      fn(p.factors[l][i].data(), g.d_factors[l][i].data(),
         p.factors[l][i].size());
}

}  // namespace

void gd_step(TnnParams& params, const GradientSet& grads, double eta) {
  const auto& k = kernels::active();
  for_each_block(params, grads, [&](double* p, const double* g, std::size_t n) {
    k.axpy(-eta, g, p, n);
  });
}

AdamState AdamState::zeros_like(const TnnParams& params) {
  AdamState s;
  s.m_core = Tensor3(params.core.shape());
  s.v_core = Tensor3(params.core.shape());
  for (const auto& trio : params.factors) {
    std::array<Matrix, 3> m, v;
    for (int i = 0; i < 3; ++i) {
      m[i] = Matrix(trio[i].rows(), trio[i].cols());
      v[i] = Matrix(trio[i].rows(), trio[i].cols());
    }
    s.m_factors.push_back(std::move(m));
    s.v_factors.push_back(std::move(v));
  }
  return s;
}

void adam_step(AdamState& state, TnnParams& params, const GradientSet& grads,
               const OptimizerConfig& opt, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("adam_step: t must be >= 1");
  const auto& k = kernels::active();
  const double bias1 = 1.0 - std::pow(opt.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(opt.beta2, static_cast<double>(t));
  k.adam_step(params.core.data(), grads.d_core.data(), state.m_core.data(),
              state.v_core.data(), params.core.size(), opt.learning_rate,
              opt.beta1, opt.beta2, opt.epsilon, bias1, bias2);
  for (std::size_t l = 0; l < params.factors.size(); ++l)
    for (int i = 0; i < 3; ++i)
      k.adam_step(params.factors[l][i].data(), grads.d_factors[l][i].data(),
                  state.m_factors[l][i].data(), state.v_factors[l][i].data(),
                  params.factors[l][i].size(), opt.learning_rate, opt.beta1,
                  opt.beta2, opt.epsilon, bias1, bias2);
}

FitResult fit(TnnParams params, const ModelConfig& config, const Tensor3& y,
              const Tensor3& o, const LossSpec& loss_spec,
              const OptimizerConfig& opt) {
  opt.validate();
  loss_spec.validate();
  params.validate_against(config);

  AdamState state;
  if (opt.method == OptimMethod::adam) state = AdamState::zeros_like(params);

  TrainTrace trace;
  double prev_loss = 0.0;
  bool have_prev = false;
  std::int64_t k = 0;
  StopReason reason = StopReason::max_iters;

  while (k < opt.max_iters) {
    auto [f, grads] = backward(params, config, y, o, loss_spec);
    if (!std::isfinite(f))
      throw NumericError("fit: non-finite loss at iteration " + std::to_string(k));
    if (k % opt.record_stride == 0) trace.entries.push_back({k, f});
    if (have_prev && std::abs(f - prev_loss) <= opt.stop_threshold) {
      reason = StopReason::threshold;
      break;
    }
    prev_loss = f;
    have_prev = true;
    if (opt.method == OptimMethod::adam)
      adam_step(state, params, grads, opt, k + 1);
    else
      gd_step(params, grads, opt.learning_rate);
    ++k;
  }

  const double final_f = loss(params, config, y, o, loss_spec);
  if (!std::isfinite(final_f))
    throw NumericError("fit: non-finite loss at iteration " + std::to_string(k));
  trace.iterations = k;
  trace.reason = reason;
  trace.final_loss = final_f;
  return {std::move(params), std::move(trace)};
}

}  // namespace tensorfield
