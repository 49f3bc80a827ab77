// Command-line driver: synthetic fields, sampling, reconstruction, sweeps
// and diagnostics over the text grid/mask formats.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tensorfield/harness.hpp"
#include "tensorfield/io.hpp"
#include "tensorfield/rng.hpp"

namespace {

using namespace tensorfield;

ObservationSet load_observations(const std::string& obs_path,
                                 const std::string& mask_path) {
  ObservationSet obs;
  obs.y = read_grid(obs_path);
  obs.o = read_mask(mask_path);
  if (!obs.y.same_shape(obs.o))
    throw IoError("observation grid " + shape_str(obs.y.shape()) +
                  " and mask " + shape_str(obs.o.shape()) + " disagree");
  for (std::size_t i = 0; i < obs.o.size(); ++i)
    if (obs.o.data()[i] == 1.0) ++obs.n_observed;
  obs.sampling.rho = static_cast<double>(obs.n_observed) /
                     static_cast<double>(obs.o.size());
  obs.validate();
  return obs;
}

int cmd_synth(std::uint64_t seed, std::vector<int> shape,
              const std::string& out) {
  if (shape.size() != 3) throw ConfigError("--shape needs three integers");
  Tensor3 field = synthetic_field({shape[0], shape[1], shape[2]}, seed);
  write_grid(out, field);
  std::cout << "wrote " << out << " shape=" << shape_str(field.shape())
            << " std=" << format_double(tensor_std(field)) << "\n";
  return 0;
}

int cmd_sample(const std::string& grid_path, double rho, double sigma,
               std::uint64_t seed, const std::string& out_obs,
               const std::string& out_mask) {
  Tensor3 field = read_grid(grid_path);
  SamplingSpec sampling{rho, derive_seed(seed, "mask")};
  NoiseSpec noise{sigma, derive_seed(seed, "noise")};
  Tensor3 mask = sample_mask(field.shape(), sampling);
  ObservationSet obs = observe(field, mask, noise);
  obs.sampling = sampling;
  write_grid(out_obs, obs.y);
  write_mask(out_mask, obs.o);
  std::cout << "wrote " << out_obs << " and " << out_mask
            << " n_observed=" << obs.n_observed << "\n";
  return 0;
}

int cmd_reconstruct(const std::string& obs_path, const std::string& mask_path,
                    const std::string& config_path, const std::string& method,
                    const std::string& out, const std::string& truth_path) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : parse_run_config(config_path);
  ObservationSet obs = load_observations(obs_path, mask_path);
  Tensor3 truth;
  const bool have_truth = !truth_path.empty();
  if (have_truth) truth = read_grid(truth_path);

  Tensor3 x_hat;
  std::int64_t iters = 0;
  std::string stop = "-";
  std::string final_loss = "-";
  if (method == "tnn") {
    ReconReport rep = reconstruct(obs, cfg.model, cfg.loss, cfg.optimizer,
                                  cfg.init_seed, have_truth ? &truth : nullptr);
    x_hat = std::move(rep.x_hat);
    iters = rep.trace.iterations;
    stop = to_string(rep.trace.reason);
    final_loss = format_double(rep.trace.final_loss);
  } else if (method == "tucker_als") {
    TuckerAlsResult res = tucker_als_complete(obs, cfg.tucker);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    x_hat = std::move(res.x_hat);
    iters = res.sweeps;
    final_loss = format_double(res.residual_history.back());
  } else if (method == "spline") {
    SplineModel model = spline_fit(obs, cfg.spline_green, cfg.spline_ridge);
    x_hat = spline_predict_grid(model, obs.y.shape());
  } else {
    throw ConfigError("unknown method '" + method +
                      "' (expected tnn, tucker_als or spline)");
  }
  write_grid(out, x_hat);

  std::cout << "method=" << method << " n_observed=" << obs.n_observed
            << " iters=" << iters << " stop=" << stop
            << " final_loss=" << final_loss;
  if (have_truth) std::cout << " rmse=" << format_double(rmse(x_hat, truth));
  std::cout << " out=" << out << " config="
            << config_echo(cfg.model, cfg.optimizer, cfg.loss) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out) {
  RunConfig cfg = parse_run_config(config_path);
  Tensor3 field = cfg.field.load();
  const int threads = sweep_threads_from_env();
  std::vector<TrialResult> results = run_sweep(field, cfg, threads);
  write_report_csv(out, results);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.failed;
  std::cout << "wrote " << out << " trials=" << results.size()
            << " failed=" << failed << " threads=" << threads << "\n";
  return failed == 0 ? 0 : 2;
}

int cmd_noisefit(const std::string& config_path, double sigma,
                 const std::string& out) {
  RunConfig cfg = parse_run_config(config_path);
  Tensor3 field = cfg.field.load();
  NoiseFitTraces traces = noise_fit_experiment(cfg.model, cfg.optimizer, sigma,
                                               field, cfg.noise.seed);
  const double t = static_cast<double>(traces.entry_count);

  std::ofstream csv(out);
  if (!csv) throw IoError("cannot write '" + out + "'");
  csv << "iteration,mse_noise,mse_field,mse_field_noise\n";
  const auto& a = traces.noise.entries;
  const auto& b = traces.field.entries;
  const auto& c = traces.field_plus_noise.entries;
  for (std::size_t i = 0; i < a.size() && i < b.size() && i < c.size(); ++i)
    csv << a[i].iter << ',' << format_double(a[i].loss / t) << ','
        << format_double(b[i].loss / t) << ',' << format_double(c[i].loss / t)
        << '\n';
  csv << traces.noise.iterations << ','
      << format_double(traces.noise.final_loss / t) << ','
      << format_double(traces.field.final_loss / t) << ','
      << format_double(traces.field_plus_noise.final_loss / t) << '\n';
  csv.flush();
  if (!csv) throw IoError("write failed for '" + out + "'");

  std::cout << "final_mse_noise=" << format_double(traces.noise.final_loss / t)
            << " final_mse_field=" << format_double(traces.field.final_loss / t)
            << " final_mse_field_noise="
            << format_double(traces.field_plus_noise.final_loss / t)
            << " noise_energy_per_entry="
            << format_double(traces.target_sq_noise / t)
            << " centered_noise_energy_per_entry="
            << format_double(traces.centered_sq_noise / t) << " out=" << out
            << "\n";
  return 0;
}

int cmd_decompose(const std::string& truth_path, const std::string& obs_path,
                  const std::string& mask_path, const std::string& config_path,
                  const std::string& out) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : parse_run_config(config_path);
  Tensor3 truth = read_grid(truth_path);
  ObservationSet obs = load_observations(obs_path, mask_path);
  ErrorDecompositionReport rep = error_decomposition(
      truth, cfg.model, cfg.loss, cfg.optimizer, obs, cfg.init_seed);
  const auto& d = rep.decomposition;
  std::ofstream csv(out);
  if (!csv) throw IoError("cannot write '" + out + "'");
  csv << "E,E1,E2,eps,identity_residual\n";
  csv << format_double(d.total) << ',' << format_double(d.representation)
      << ',' << format_double(d.identification) << ','
      << format_double(d.cross) << ',' << format_double(d.identity_residual())
      << '\n';
  csv.flush();
  if (!csv) throw IoError("write failed for '" + out + "'");
  std::cout << "E=" << format_double(d.total)
            << " E1=" << format_double(d.representation)
            << " E2=" << format_double(d.identification)
            << " eps=" << format_double(d.cross)
            << " identity_residual=" << format_double(d.identity_residual())
            << " out=" << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3D gridded-field reconstruction from sparse noisy samples"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "generate a synthetic field grid");
  std::uint64_t synth_seed = 7;
  std::vector<int> synth_shape{20, 20, 20};
  std::string synth_out;
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--shape", synth_shape, "grid shape I J K")->expected(3);
  synth->add_option("--out", synth_out, "output grid path")->required();

  auto* sample = app.add_subcommand("sample", "sample a grid into obs + mask");
  std::string sample_grid, sample_obs, sample_mask_path;
  double sample_rho = 0.2, sample_sigma = 0.0;
  std::uint64_t sample_seed = 1;
  sample->add_option("--grid", sample_grid, "input grid")->required();
  sample->add_option("--rho", sample_rho, "sampling ratio in (0,1]");
  sample->add_option("--sigma", sample_sigma, "noise std");
  sample->add_option("--seed", sample_seed, "sampling/noise seed");
  sample->add_option("--out-obs", sample_obs, "observation grid path")->required();
  sample->add_option("--out-mask", sample_mask_path, "mask path")->required();

  auto* rec = app.add_subcommand("reconstruct",
                                 "reconstruct a field from obs + mask");
  std::string rec_obs, rec_mask, rec_config, rec_method = "tnn", rec_out,
                                 rec_truth;
  rec->add_option("--obs", rec_obs, "observation grid")->required();
  rec->add_option("--mask", rec_mask, "mask file")->required();
  rec->add_option("--config", rec_config, "run config file");
  rec->add_option("--method", rec_method, "tnn | tucker_als | spline");
  rec->add_option("--out", rec_out, "reconstructed grid path")->required();
  rec->add_option("--truth", rec_truth, "ground-truth grid (adds rmse)");

  auto* sweep = app.add_subcommand(
      "sweep", "run the (method x rho x sigma x seed) trial grid");
  std::string sweep_config, sweep_out;
  sweep->add_option("--config", sweep_config, "run config file")->required();
  sweep->add_option("--out", sweep_out, "report csv path")->required();

  auto* nf = app.add_subcommand(
      "noisefit", "fit the model to noise, the field, and field+noise");
  std::string nf_config, nf_out;
  double nf_sigma = 0.5;
  nf->add_option("--config", nf_config, "run config file")->required();
  nf->add_option("--sigma", nf_sigma, "noise std");
  nf->add_option("--out", nf_out, "trace csv path")->required();

  auto* dec = app.add_subcommand("decompose",
                                 "reconstruction-error decomposition");
  std::string dec_truth, dec_obs, dec_mask, dec_config, dec_out;
  dec->add_option("--truth", dec_truth, "ground-truth grid")->required();
  dec->add_option("--obs", dec_obs, "observation grid")->required();
  dec->add_option("--mask", dec_mask, "mask file")->required();
  dec->add_option("--config", dec_config, "run config file");
  dec->add_option("--out", dec_out, "decomposition csv path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(synth_seed, synth_shape, synth_out);
    if (sample->parsed())
      return cmd_sample(sample_grid, sample_rho, sample_sigma, sample_seed,
                        sample_obs, sample_mask_path);
    if (rec->parsed())
      return cmd_reconstruct(rec_obs, rec_mask, rec_config, rec_method,
                             rec_out, rec_truth);
    if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out);
    if (nf->parsed()) return cmd_noisefit(nf_config, nf_sigma, nf_out);
    if (dec->parsed())
      return cmd_decompose(dec_truth, dec_obs, dec_mask, dec_config, dec_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
