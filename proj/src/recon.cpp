#include "tensorfield/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tensorfield/kernels.hpp"
#include "tensorfield/rng.hpp"
#include "tensorfield/tensor_ops.hpp"

namespace tensorfield {

void ObservationSet::validate() const {
  if (!y.same_shape(o))
    throw ShapeError("observation: y shape " + shape_str(y.shape()) +
                     " vs mask " + shape_str(o.shape()));
  std::int64_t count = 0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double m = o.data()[i];
    if (m != 0.0 && m != 1.0)
      throw ShapeError("observation: mask entries must be 0 or 1");
    if (m == 0.0 && y.data()[i] != 0.0)
      throw ShapeError("observation: y must be zero where the mask is zero");
    count += m == 1.0;
  }
  if (count != n_observed)
    throw ShapeError("observation: n_observed=" + std::to_string(n_observed) +
                     " but mask has " + std::to_string(count) + " ones");
}

Tensor3 sample_mask(std::array<int, 3> shape, const SamplingSpec& spec) {
  if (!(spec.rho > 0.0) || spec.rho > 1.0)
    throw std::invalid_argument("sampling: rho must be in (0, 1], got " +
                                std::to_string(spec.rho));
  Tensor3 mask(shape);
  const std::size_t total = mask.size();
  const std::int64_t n = std::llround(spec.rho * static_cast<double>(total));
  if (n < 1)
    throw std::invalid_argument("sampling: rho " + std::to_string(spec.rho) +
                                " selects zero entries of " + shape_str(shape));
  std::vector<std::uint32_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0u);
  Rng rng(spec.seed);
  // partial Fisher-Yates: the first n entries are a uniform sample
  for (std::int64_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.below(total - i);
    std::swap(idx[i], idx[j]);
  }
  for (std::int64_t i = 0; i < n; ++i) mask.data()[idx[i]] = 1.0;
  return mask;
}

ObservationSet observe(const Tensor3& x, const Tensor3& mask,
                       const NoiseSpec& noise) {
  if (!x.same_shape(mask))
    throw ShapeError("observe: field shape " + shape_str(x.shape()) +
                     " vs mask " + shape_str(mask.shape()));
  if (!std::isfinite(noise.sigma) || noise.sigma < 0.0)
    throw std::invalid_argument("observe: sigma must be finite and >= 0");
  ObservationSet obs;
  obs.o = mask;
  obs.y = Tensor3(x.shape());
  obs.noise = noise;
  Rng rng(noise.seed);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask.data()[i] == 1.0) {
      double e = noise.sigma > 0.0 ? rng.gaussian(noise.sigma) : 0.0;
      obs.y.data()[i] = x.data()[i] + e;
      ++obs.n_observed;
    }
  }
  obs.sampling.rho =
      static_cast<double>(obs.n_observed) / static_cast<double>(x.size());
  return obs;
}

double rmse(const Tensor3& x_hat, const Tensor3& x) {
  if (!x_hat.same_shape(x))
    throw ShapeError("rmse: shapes " + shape_str(x_hat.shape()) + " vs " +
                     shape_str(x.shape()));
  Tensor3 d(x.shape());
  kernels::active().sub(x_hat.data(), x.data(), d.data(), d.size());
  return std::sqrt(frobenius_norm_sq(d) / static_cast<double>(d.size()));
}

Normalization Normalization::from_observed(const ObservationSet& obs) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < obs.o.size(); ++i)
    if (obs.o.data()[i] == 1.0) {
      lo = std::min(lo, obs.y.data()[i]);
      hi = std::max(hi, obs.y.data()[i]);
    }
  Normalization n;
  if (!(hi > lo)) {  // constant or empty observations
    n.offset = std::isfinite(lo) ? lo : 0.0;
    n.scale = 1.0;
    return n;
  }
  n.offset = 0.5 * (lo + hi);
  n.scale = 1.8 / (hi - lo);  // observed range maps onto [-0.9, 0.9]
  return n;
}

namespace {

Tensor3 normalized_target(const ObservationSet& obs, const Normalization& n) {
  Tensor3 y(obs.y.shape());
  for (std::size_t i = 0; i < y.size(); ++i)
    if (obs.o.data()[i] == 1.0) y.data()[i] = n.normalize(obs.y.data()[i]);
  return y;
}

}  // namespace

ReconReport reconstruct(const ObservationSet& obs, const ModelConfig& model,
                        const LossSpec& loss_spec, const OptimizerConfig& opt,
                        std::uint64_t init_seed, const Tensor3* truth) {
  model.validate();
  if (obs.n_observed < 1)
    throw std::invalid_argument("reconstruct: mask has no observed entries");
  if (obs.y.shape() != model.output_dims())
    throw ShapeError("reconstruct: observations " + shape_str(obs.y.shape()) +
                     " vs model output " + shape_str(model.output_dims()));

  ReconReport report;
  report.norm = Normalization::from_observed(obs);
  Tensor3 y = normalized_target(obs, report.norm);

  TnnParams params0 = init_params(model, init_seed);
  FitResult res = fit(std::move(params0), model, y, obs.o, loss_spec, opt);
  report.trace = std::move(res.trace);

  Tensor3 x_hat = tnn_forward(res.params, model);
  for (double& v : x_hat.values()) v = report.norm.denormalize(v);
  report.x_hat = std::move(x_hat);
  if (truth) report.rmse = rmse(report.x_hat, *truth);
  return report;
}

ErrorDecomposition decompose_error(const Tensor3& x, const Tensor3& best_fit,
                                   const Tensor3& x_hat) {
  const auto& k = kernels::active();
  Tensor3 rep(x.shape()), idf(x.shape()), tot(x.shape());
  k.sub(x.data(), best_fit.data(), rep.data(), rep.size());
  k.sub(best_fit.data(), x_hat.data(), idf.data(), idf.size());
  k.sub(x.data(), x_hat.data(), tot.data(), tot.size());
  ErrorDecomposition d;
  d.total = frobenius_norm_sq(tot);
  d.representation = frobenius_norm_sq(rep);
  d.identification = frobenius_norm_sq(idf);
  d.cross = 2.0 * inner_product(rep, idf);
  return d;
}

ErrorDecompositionReport error_decomposition(const Tensor3& x,
                                             const ModelConfig& model,
                                             const LossSpec& loss_spec,
                                             const OptimizerConfig& opt,
                                             const ObservationSet& obs,
                                             std::uint64_t init_seed) {
  // reference fit: full observation of the ground truth, plain least squares
  Tensor3 ones(x.shape(), 1.0);
  ObservationSet full = observe(x, ones, NoiseSpec{0.0, 0});
  LossSpec plain;  // lambda = 0
  ErrorDecompositionReport out;
  out.full_field_fit =
      reconstruct(full, model, plain, opt, derive_seed(init_seed, "reference"));
  out.sampled_fit = reconstruct(obs, model, loss_spec, opt, init_seed);
  out.decomposition =
      decompose_error(x, out.full_field_fit.x_hat, out.sampled_fit.x_hat);
  return out;
}

double noise_rejection_factor(std::int64_t r, std::int64_t t) {
  if (r < 1 || t < 1)
    throw std::invalid_argument("noise_rejection_factor: need r, t >= 1");
  return 1.0 - 10.0 * static_cast<double>(r) / static_cast<double>(t);
}

NoiseRejectionRun noise_rejection_fit(std::array<int, 3> core_dims,
                                      std::array<int, 3> shape, double sigma,
                                      std::uint64_t seed,
                                      const OptimizerConfig& opt) {
  Tensor3 noise(shape);
  Rng rng(derive_seed(seed, "noise"));
  for (double& v : noise.values()) v = rng.gaussian(sigma);

  ModelConfig model;
  model.core_dims = core_dims;
  model.layers = {{shape, Activation::relu()}};

  Tensor3 ones(shape, 1.0);
  TnnParams p0 = init_params(model, derive_seed(seed, "init"));
  FitResult res = fit(std::move(p0), model, noise, ones, LossSpec{}, opt);

  NoiseRejectionRun run;
  run.trace = std::move(res.trace);
  Tensor3 out = tnn_forward(res.params, model);
  Tensor3 diff(shape);
  kernels::active().sub(out.data(), noise.data(), diff.data(), diff.size());
  run.residual_sq = frobenius_norm_sq(diff);
  run.noise_sq = frobenius_norm_sq(noise);
  return run;
}

NoiseFitTraces noise_fit_experiment(const ModelConfig& model,
                                    const OptimizerConfig& opt, double sigma,
                                    const Tensor3& field, std::uint64_t seed) {
  model.validate();
  if (field.shape() != model.output_dims())
    throw ShapeError("noise_fit_experiment: field " + shape_str(field.shape()) +
                     " vs model output " + shape_str(model.output_dims()));
  Tensor3 noise(field.shape());
  Rng rng(derive_seed(seed, "noise"));
  for (double& v : noise.values()) v = rng.gaussian(sigma);

  Tensor3 field_plus_noise(field.shape());
  kernels::active().add(field.data(), noise.data(), field_plus_noise.data(),
                        field.size());

  Tensor3 ones(field.shape(), 1.0);
  NoiseFitTraces traces;
  traces.entry_count = static_cast<std::int64_t>(field.size());

  const Tensor3* targets[3] = {&noise, &field, &field_plus_noise};
  TrainTrace* out_traces[3] = {&traces.noise, &traces.field,
                               &traces.field_plus_noise};
  double* out_sq[3] = {&traces.target_sq_noise, &traces.target_sq_field,
                       &traces.target_sq_field_plus_noise};
  for (int t = 0; t < 3; ++t) {
    ObservationSet obs = observe(*targets[t], ones, NoiseSpec{0.0, 0});
    Normalization norm = Normalization::from_observed(obs);
    Tensor3 y = normalized_target(obs, norm);
    *out_sq[t] = frobenius_norm_sq(y);
    if (t == 0) {
      double mean = 0.0;
      for (double v : y.values()) mean += v;
      mean /= static_cast<double>(y.size());
      traces.centered_sq_noise =
          *out_sq[t] - static_cast<double>(y.size()) * mean * mean;
    }
    TnnParams p0 = init_params(model, derive_seed(seed, "init"));
    FitResult res = fit(std::move(p0), model, y, ones, LossSpec{}, opt);
    *out_traces[t] = std::move(res.trace);
  }
  return traces;
}

double tensor_std(const Tensor3& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x.values()) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x.values()) var += (v - mean) * (v - mean);
  return std::sqrt(var / n);
}

namespace {

// Low-frequency cosine mix, unit-RMS, for smooth factor columns.
std::vector<double> smooth_column(int dim, Rng& rng) {
  std::vector<double> col(dim);
  const double a0 = rng.gaussian();
  const double a1 = rng.gaussian();
  const double a2 = rng.gaussian();
  const double a3 = rng.gaussian();
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < dim; ++i) {
    const double u = (i + 0.5) / dim;
    col[i] = a0 + a1 * std::cos(pi * u) + a2 * std::cos(2.0 * pi * u) +
             a3 * std::cos(3.0 * pi * u);
  }
  double rms = 0.0;
  for (double v : col) rms += v * v;
  rms = std::sqrt(rms / dim);
  if (rms > 0.0)
    for (double& v : col) v /= rms;
  return col;
}

}  // namespace

Tensor3 synthetic_low_rank_field(std::array<int, 3> shape,
                                 std::array<int, 3> ranks, std::uint64_t seed) {
  Rng rng(seed);
  Tensor3 core(ranks);
  for (double& v : core.values()) v = rng.gaussian();
  std::array<Matrix, 3> u;
  for (int p = 0; p < 3; ++p) {
    u[p] = Matrix(shape[p], ranks[p]);
    for (int c = 0; c < ranks[p]; ++c) {
      auto col = smooth_column(shape[p], rng);
      for (int r = 0; r < shape[p]; ++r) u[p](r, c) = col[r];
    }
  }
  return tucker_compose(core, u[0], u[1], u[2]);
}

Tensor3 synthetic_field(std::array<int, 3> shape, std::uint64_t seed) {
  const auto [di, dj, dk] = shape;
  Rng rng(derive_seed(seed, "field"));

  // depth profile along mode 3 (0..190 m), canonical sound-channel shape
  std::vector<double> profile(dk);
  {
    double mean = 0.0;
    for (int z = 0; z < dk; ++z) {
      const double depth = dk > 1 ? 190.0 * z / (dk - 1) : 0.0;
      const double zt = 2.0 * (depth - 1300.0) / 1300.0;
      profile[z] = 1500.0 * (1.0 + 0.00737 * (zt - 1.0 + std::exp(-zt)));
      mean += profile[z];
    }
    mean /= dk;
    double sd = 0.0;
    for (double v : profile) sd += (v - mean) * (v - mean);
    sd = std::sqrt(sd / dk);
    const double amp = 1.2;
    for (double& v : profile) v = sd > 0.0 ? amp * (v - mean) / sd : 0.0;
  }

  // smooth low-multilinear-rank component, normalized to std 1.2
  Tensor3 lowrank = synthetic_low_rank_field(shape, {4, 4, 4}, rng.next_u64());
  {
    const double sd = tensor_std(lowrank);
    const double amp = 1.0;
    if (sd > 0.0)
      for (double& v : lowrank.values()) v *= amp / sd;
  }

  Tensor3 field(shape, 1540.0);
  for (int z = 0; z < dk; ++z)
    for (int y = 0; y < dj; ++y)
      for (int x = 0; x < di; ++x)
        field(x, y, z) += profile[z] + lowrank(x, y, z);

  // rotated anisotropic Gaussian bumps; the rotation's cross terms make
  // them non-separable, so no multilinear model captures them exactly
  const int bumps = 6;
  for (int b = 0; b < bumps; ++b) {
    const double cx = rng.uniform(0.2, 0.8) * (di - 1);
    const double cy = rng.uniform(0.2, 0.8) * (dj - 1);
    const double cz = rng.uniform(0.2, 0.8) * (dk - 1);
    double basis[3][3];
    {
      // random orthonormal frame via Gram-Schmidt on gaussian vectors
      for (auto& row : basis)
        for (double& v : row) v = rng.gaussian();
      for (int r = 0; r < 3; ++r) {
        for (int p = 0; p < r; ++p) {
          double dot = 0.0;
          for (int c = 0; c < 3; ++c) dot += basis[r][c] * basis[p][c];
          for (int c = 0; c < 3; ++c) basis[r][c] -= dot * basis[p][c];
        }
        double norm = 0.0;
        for (double v : basis[r]) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : basis[r]) v /= norm;
      }
    }
    const double w[3] = {rng.uniform(0.9, 1.8), rng.uniform(1.4, 2.6),
                         rng.uniform(2.0, 4.0)};
    const double amp = (b % 2 == 0 ? 1.0 : -1.0) * rng.uniform(2.5, 3.5);
    for (int z = 0; z < dk; ++z)
      for (int y = 0; y < dj; ++y)
        for (int x = 0; x < di; ++x) {
          const double v[3] = {x - cx, y - cy, z - cz};
          double q = 0.0;
          for (int r = 0; r < 3; ++r) {
            double proj = 0.0;
            for (int c = 0; c < 3; ++c) proj += basis[r][c] * v[c];
            q += proj * proj / (2.0 * w[r] * w[r]);
          }
          field(x, y, z) += amp * std::exp(-q);
        }
  }
  return field;
}

}  // namespace tensorfield
