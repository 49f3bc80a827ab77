#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "tensorfield/optim.hpp"
#include "tensorfield/tensor3.hpp"

namespace tensorfield {

struct SamplingSpec {
  double rho = 0.2;  // fraction of entries observed, in (0, 1]
  std::uint64_t seed = 0;
};

struct NoiseSpec {
  double sigma = 0.0;  // i.i.d. Gaussian std, physical units
  std::uint64_t seed = 0;
};

/// Mask + observation pair; y is zero wherever o is zero.
struct ObservationSet {
  Tensor3 y;
  Tensor3 o;
  std::int64_t n_observed = 0;
  SamplingSpec sampling;
  NoiseSpec noise;

  void validate() const;
};

/// Binary mask with exactly round(rho*T) ones, drawn uniformly without
/// replacement (seeded partial Fisher-Yates).
Tensor3 sample_mask(std::array<int, 3> shape, const SamplingSpec& spec);

/// y = mask * (x + e); Gaussian e drawn only at observed entries, in
/// canonical order.
ObservationSet observe(const Tensor3& x, const Tensor3& mask,
                       const NoiseSpec& noise);

double rmse(const Tensor3& x_hat, const Tensor3& x);

/// Affine map v -> (v - offset) * scale recorded during fitting so the
/// reconstruction can be reported in physical units.
struct Normalization {
  double offset = 0.0;
  double scale = 1.0;

  double normalize(double v) const { return (v - offset) * scale; }
  double denormalize(double v) const { return v / scale + offset; }

  /// Maps the observed values of obs into [-0.9, 0.9].
  static Normalization from_observed(const ObservationSet& obs);
};

struct ErrorDecomposition {
  double total = 0.0;        // ||x - x_hat||_F^2
  double representation = 0.0;  // ||x - best_fit||_F^2
  double identification = 0.0;  // ||best_fit - x_hat||_F^2
  double cross = 0.0;           // 2<x - best_fit, best_fit - x_hat>

  double identity_residual() const {
    return total - (representation + identification + cross);
  }
};

struct ReconReport {
  Tensor3 x_hat;
  std::optional<double> rmse;  // only when ground truth supplied
  TrainTrace trace;
  std::string config_echo;
  Normalization norm;
};

/// TNN reconstruction: normalize observed values, fit, denormalize the
/// forward pass into x_hat. Throws on an all-zero mask.
ReconReport reconstruct(const ObservationSet& obs, const ModelConfig& model,
                        const LossSpec& loss_spec, const OptimizerConfig& opt,
                        std::uint64_t init_seed,
                        const Tensor3* truth = nullptr);

/// The algebraic split of ||x - x_hat||^2 around a reference fit.
ErrorDecomposition decompose_error(const Tensor3& x, const Tensor3& best_fit,
                                   const Tensor3& x_hat);

struct ErrorDecompositionReport {
  ErrorDecomposition decomposition;
  ReconReport full_field_fit;  // reference model fitted to the full field
  ReconReport sampled_fit;     // model fitted to the observations
};

/// Fits the model twice (full field with lambda=0, then the observations
/// with the given loss spec) and decomposes the reconstruction error.
ErrorDecompositionReport error_decomposition(const Tensor3& x,
                                             const ModelConfig& model,
                                             const LossSpec& loss_spec,
                                             const OptimizerConfig& opt,
                                             const ObservationSet& obs,
                                             std::uint64_t init_seed);

/// Residual-energy floor factor (1 - 10R/T) for a rank-R one-layer model on
/// T entries; multiply by the noise energy to get the floor itself.
double noise_rejection_factor(std::int64_t r, std::int64_t t);

struct NoiseRejectionRun {
  double residual_sq = 0.0;  // ||model output - noise||_F^2 after fitting
  double noise_sq = 0.0;     // ||noise||_F^2
  TrainTrace trace;
};

/// Fits a one-layer ReLU model (core core_dims -> shape) directly to a raw
/// Gaussian noise tensor; used to check the rejection floor empirically.
NoiseRejectionRun noise_rejection_fit(std::array<int, 3> core_dims,
                                      std::array<int, 3> shape, double sigma,
                                      std::uint64_t seed,
                                      const OptimizerConfig& opt);

struct NoiseFitTraces {
  TrainTrace noise, field, field_plus_noise;
  // Sum of squares of each normalized fitting target, same order.
  double target_sq_noise = 0.0;
  double target_sq_field = 0.0;
  double target_sq_field_plus_noise = 0.0;
  // Mean-removed energy of the normalized noise target. The min/max affine
  // map leaves the noise with a DC component that a rank-1 output absorbs
  // trivially, so the rejection floor is stated against this.
  double centered_sq_noise = 0.0;
  std::int64_t entry_count = 0;
};

/// Fits the model to (a) pure noise, (b) the field, (c) field + noise, each
/// fully observed with lambda=0 and normalized to [-0.9, 0.9] beforehand.
NoiseFitTraces noise_fit_experiment(const ModelConfig& model,
                                    const OptimizerConfig& opt, double sigma,
                                    const Tensor3& field, std::uint64_t seed);

/// Synthetic sound-speed-like field: smooth depth profile plus a smooth
/// low-multilinear-rank perturbation plus two Gaussian bumps, around a
/// 1540 m/s base. Deterministic per seed; std is ~2 m/s on the 20^3 grid.
Tensor3 synthetic_field(std::array<int, 3> shape, std::uint64_t seed);

/// Exactly multilinear-rank-(r1,r2,r3) random field (test oracle input).
Tensor3 synthetic_low_rank_field(std::array<int, 3> shape,
                                 std::array<int, 3> ranks, std::uint64_t seed);

double tensor_std(const Tensor3& x);

}  // namespace tensorfield
