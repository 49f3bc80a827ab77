#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tensorfield/recon.hpp"
#include "tensorfield/tensor3.hpp"

namespace tensorfield {

enum class GreenFn { distance };  // g(i, j) = ||i - j||_2 in grid coordinates

/// Weighted sum of Green functions centered at the sample locations.
struct SplineModel {
  std::vector<std::array<int, 3>> sample_indices;
  std::vector<double> weights;
  GreenFn green = GreenFn::distance;
  double ridge = 0.0;
};

/// Spec'd default: 1e-8 * trace(G)/N (zero for the distance Green function,
/// whose diagonal vanishes). Pass ridge < 0 to request it.
constexpr double kSplineRidgeDefault = -1.0;

/// Solves (G + ridge*I) w = y_obs with G_nk = g(i_n, i_k); verifies the
/// relative residual of the regularized system is < 1e-8.
SplineModel spline_fit(const ObservationSet& obs, GreenFn green,
                       double ridge = kSplineRidgeDefault);

double spline_predict(const SplineModel& model, std::array<int, 3> index);
Tensor3 spline_predict_grid(const SplineModel& model, std::array<int, 3> shape);

struct TuckerAlsConfig {
  std::array<int, 3> core_dims{5, 5, 5};
  int max_sweeps = 100;
  double tol = 1e-9;  // relative change in masked residual
  std::uint64_t seed = 0;
};

struct TuckerAlsResult {
  Tensor3 x_hat;
  std::vector<double> residual_history;  // masked residual after each sweep
  int sweeps = 0;
  std::vector<std::string> warnings;     // frozen unidentifiable rows
};

/// Alternating masked least squares for the Tucker model: cyclic row-wise
/// factor updates followed by a full masked core solve, each an exact
/// least-squares minimization over its block (so the masked residual never
/// increases).
TuckerAlsResult tucker_als_complete(const ObservationSet& obs,
                                    const TuckerAlsConfig& cfg);

}  // namespace tensorfield
