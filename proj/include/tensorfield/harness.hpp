#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tensorfield/io.hpp"

namespace tensorfield {

struct TrialSpec {
  std::string method;  // tnn | tnn_tv | tucker_als | spline
  double rho = 0.2;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct TrialResult {
  TrialSpec spec;
  double rmse = 0.0;
  std::int64_t iters = 0;
  double wall_seconds = 0.0;
  std::string note;  // non-empty on failure
  bool failed = false;
};

/// Runs one trial against a known field: seeded mask + noise from the trial
/// seed, then the requested method.
TrialResult run_trial(const Tensor3& field, const TrialSpec& spec,
                      const RunConfig& cfg);

/// Runs the full (method x rho x sigma x seed) grid of cfg, at most `threads`
/// trials in flight; failures become rows with a note. Results are returned
/// in canonical (method, rho, sigma, seed) order regardless of scheduling.
std::vector<TrialResult> run_sweep(const Tensor3& field, const RunConfig& cfg,
                                   int threads);

/// CSV report: header, per-trial rows, then a mean row (seed = "mean") per
/// (method, rho, sigma) group, means taken over its non-failed trials.
std::string report_csv(const std::vector<TrialResult>& results);

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<TrialResult>& results);

/// Thread cap from TENSORFIELD_THREADS (default 1).
int sweep_threads_from_env();

}  // namespace tensorfield
