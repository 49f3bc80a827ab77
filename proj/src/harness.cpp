#include "tensorfield/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "tensorfield/rng.hpp"

namespace tensorfield {

namespace {

double wall_now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

TrialResult run_trial(const Tensor3& field, const TrialSpec& spec,
                      const RunConfig& cfg) {
  TrialResult result;
  result.spec = spec;
  const double t0 = wall_now();
  try {
    SamplingSpec sampling{spec.rho, derive_seed(spec.seed, "mask")};
    NoiseSpec noise{spec.sigma, derive_seed(spec.seed, "noise")};
    Tensor3 mask = sample_mask(field.shape(), sampling);
    ObservationSet obs = observe(field, mask, noise);
    obs.sampling = sampling;

    if (spec.method == "tnn" || spec.method == "tnn_tv") {
      LossSpec loss;  // sweeps compare plain tnn against tnn_tv
      if (spec.method == "tnn_tv") loss = {cfg.loss.lambda, Regularizer::tv};
      ReconReport rep =
          reconstruct(obs, cfg.model, loss, cfg.optimizer,
                      derive_seed(spec.seed, "init"), &field);
      result.rmse = *rep.rmse;
      result.iters = rep.trace.iterations;
    } else if (spec.method == "tucker_als") {
      TuckerAlsConfig tcfg = cfg.tucker;
      tcfg.seed = derive_seed(spec.seed, "tucker");
      TuckerAlsResult res = tucker_als_complete(obs, tcfg);
      result.rmse = rmse(res.x_hat, field);
      result.iters = res.sweeps;
    } else if (spec.method == "spline") {
      SplineModel model = spline_fit(obs, cfg.spline_green, cfg.spline_ridge);
      result.rmse = rmse(spline_predict_grid(model, field.shape()), field);
      result.iters = 0;
    } else {
      throw std::invalid_argument("unknown method '" + spec.method + "'");
    }
  } catch (const std::exception& e) {
    result.failed = true;
    result.note = e.what();
    result.rmse = std::numeric_limits<double>::quiet_NaN();
  }
  result.wall_seconds = wall_now() - t0;
  return result;
}

std::vector<TrialResult> run_sweep(const Tensor3& field, const RunConfig& cfg,
                                   int threads) {
  auto methods = cfg.sweep_methods;
  auto rhos = cfg.sweep_rhos;
  auto sigmas = cfg.sweep_sigmas;
  auto seeds = cfg.sweep_seeds;
  std::sort(methods.begin(), methods.end());
  std::sort(rhos.begin(), rhos.end());
  std::sort(sigmas.begin(), sigmas.end());
  std::sort(seeds.begin(), seeds.end());

  std::vector<TrialSpec> specs;
  for (const auto& m : methods)
    for (double rho : rhos)
      for (double sigma : sigmas)
        for (std::uint64_t seed : seeds) specs.push_back({m, rho, sigma, seed});

  std::vector<TrialResult> results(specs.size());
  threads = std::max(1, std::min(threads, static_cast<int>(specs.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < specs.size(); ++i)
      results[i] = run_trial(field, specs[i], cfg);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= specs.size()) return;
          results[i] = run_trial(field, specs[i], cfg);
        }
      });
    for (auto& t : pool) t.join();
  }
  return results;
}

namespace {

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string num_field(double v) { return format_double(v); }

void append_row(std::ostringstream& out, const std::string& method, double rho,
                double sigma, const std::string& seed, double rmse_v,
                double iters, double wall, const std::string& note) {
  out << method << ',' << num_field(rho) << ',' << num_field(sigma) << ','
      << seed << ',' << num_field(rmse_v) << ',' << num_field(iters) << ','
      << num_field(wall) << ',' << csv_safe(note) << '\n';
}

}  // namespace

std::string report_csv(const std::vector<TrialResult>& results) {
  std::ostringstream out;
  out << "method,rho,sigma,seed,rmse,iters,wall_seconds,note\n";
  std::size_t i = 0;
  while (i < results.size()) {
    // one (method, rho, sigma) group; trials arrive in canonical order
    std::size_t j = i;
    while (j < results.size() && results[j].spec.method == results[i].spec.method &&
           results[j].spec.rho == results[i].spec.rho &&
           results[j].spec.sigma == results[i].spec.sigma)
      ++j;
    double sum_rmse = 0, sum_iters = 0, sum_wall = 0;
    std::size_t ok = 0, failed = 0;
    for (std::size_t t = i; t < j; ++t) {
      const auto& r = results[t];
      append_row(out, r.spec.method, r.spec.rho, r.spec.sigma,
                 std::to_string(r.spec.seed), r.rmse,
                 static_cast<double>(r.iters), r.wall_seconds, r.note);
      if (!r.failed) {
        sum_rmse += r.rmse;
        sum_iters += static_cast<double>(r.iters);
        sum_wall += r.wall_seconds;
        ++ok;
      } else {
        ++failed;
      }
    }
    std::string note;
    if (failed > 0) note = std::to_string(failed) + " trial(s) failed";
    if (ok > 0)
      append_row(out, results[i].spec.method, results[i].spec.rho,
                 results[i].spec.sigma, "mean", sum_rmse / ok, sum_iters / ok,
                 sum_wall / ok, note);
    else
      append_row(out, results[i].spec.method, results[i].spec.rho,
                 results[i].spec.sigma, "mean",
                 std::numeric_limits<double>::quiet_NaN(), 0, 0, note);
    i = j;
  }
  return out.str();
}

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<TrialResult>& results) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << report_csv(results);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

int sweep_threads_from_env() {
  const char* env = std::getenv("TENSORFIELD_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n < 1 ? 1 : std::min(n, 256);
}

}  // namespace tensorfield
