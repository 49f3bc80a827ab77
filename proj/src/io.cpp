#include "tensorfield/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tensorfield {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw IoError("not a number: '" + s + "'");
  return v;
}

namespace {

void write_field_file(const std::filesystem::path& path, const Tensor3& t,
                      const char* tag, bool as_binary_digits) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const auto [di, dj, dk] = t.shape();
  out << tag << " v1 " << di << " " << dj << " " << dk << "\n";
  const double* d = t.data();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (as_binary_digits)
      out << (d[i] == 1.0 ? '1' : '0');
    else
      out << format_double(d[i]);
    out << ((i + 1) % 8 == 0 || i + 1 == t.size() ? '\n' : ' ');
  }
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Tensor3 read_field_file(const std::filesystem::path& path, const char* tag) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::string file_tag, version;
  int di = 0, dj = 0, dk = 0;
  if (!(in >> file_tag >> version >> di >> dj >> dk))
    throw IoError("'" + path.string() + "': malformed header");
  if (file_tag != tag)
    throw IoError("'" + path.string() + "': expected a '" + std::string(tag) +
                  "' file, found '" + file_tag + "'");
  if (version != "v1")
    throw IoError("'" + path.string() + "': unsupported version '" + version + "'");
  if (di < 1 || dj < 1 || dk < 1)
    throw IoError("'" + path.string() + "': bad shape in header");
  Tensor3 t(di, dj, dk);
  std::string token;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(in >> token))
      throw IoError("'" + path.string() + "': expected " +
                    std::to_string(t.size()) + " values, found " +
                    std::to_string(i));
    t.data()[i] = parse_double(token);
  }
  if (in >> token)
    throw IoError("'" + path.string() + "': trailing data after " +
                  std::to_string(t.size()) + " values");
  return t;
}

}  // namespace

void write_grid(const std::filesystem::path& path, const Tensor3& t) {
  write_field_file(path, t, "ssfgrid", false);
}

Tensor3 read_grid(const std::filesystem::path& path) {
  return read_field_file(path, "ssfgrid");
}

void write_mask(const std::filesystem::path& path, const Tensor3& mask) {
  for (double v : mask.values())
    if (v != 0.0 && v != 1.0)
      throw IoError("mask values must be 0 or 1");
  write_field_file(path, mask, "ssfmask", true);
}

Tensor3 read_mask(const std::filesystem::path& path) {
  Tensor3 m = read_field_file(path, "ssfmask");
  for (double v : m.values())
    if (v != 0.0 && v != 1.0)
      throw IoError("'" + path.string() + "': mask values must be 0 or 1");
  return m;
}

Tensor3 FieldSource::load() const {
  if (!grid_path.empty()) return read_grid(grid_path);
  return synthetic_field(shape, synth_seed);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) parts.push_back(tok);
  return parts;
}

class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected 'key = value', got '" + line + "'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
      if (!entries_.emplace(key, value).second)
        throw ConfigError("config: duplicate key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string take(const std::string& key, const std::string& fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(key);
    return it->second;
  }

  template <typename Fn>
  void take_if(const std::string& key, Fn&& fn) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    consumed_.insert(key);
    fn(it->second);
  }

  void reject_unknown() const {
    for (const auto& [key, value] : entries_)
      if (!consumed_.count(key))
        throw ConfigError("config: unknown key '" + key + "'");
  }

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [key, value] : entries_)
      if (key.rfind(prefix, 0) == 0) out.push_back(key);
    return out;
  }

 private:
  std::map<std::string, std::string> entries_;
  std::set<std::string> consumed_;
};

std::array<int, 3> parse_dims(const std::string& key, const std::string& v) {
  const auto parts = split_ws(v);
  if (parts.size() != 3)
    throw ConfigError("config: '" + key + "' needs three integers, got '" + v + "'");
  std::array<int, 3> dims;
  for (int i = 0; i < 3; ++i) {
    try {
      std::size_t pos = 0;
      dims[i] = std::stoi(parts[i], &pos);
      if (pos != parts[i].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("config: '" + key + "': bad integer '" + parts[i] + "'");
    }
  }
  return dims;
}

double parse_num(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "': bad number '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "': bad integer '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "': bad unsigned integer '" + v + "'");
  }
}

void parse_model(KeyValues& kv, ModelConfig& model) {
  // only exact known keys count; typos fall through to reject_unknown()
  const bool has_model_keys =
      kv.has("model.core_dims") || kv.has("model.layer1.dims");
  if (!has_model_keys) return;
  ModelConfig cfg;
  cfg.core_dims = parse_dims("model.core_dims",
                             kv.take("model.core_dims", "5 5 5"));
  cfg.layers.clear();
  for (int l = 1;; ++l) {
    const std::string dims_key = "model.layer" + std::to_string(l) + ".dims";
    const std::string act_key =
        "model.layer" + std::to_string(l) + ".activation";
    if (!kv.has(dims_key) && !kv.has(act_key)) break;
    if (!kv.has(dims_key))
      throw ConfigError("config: '" + act_key + "' without '" + dims_key + "'");
    LayerSpec layer;
    layer.out_dims = parse_dims(dims_key, kv.take(dims_key, ""));
    const std::string act = kv.take(act_key, "relu");
    try {
      layer.act = activation_from_string(act);
    } catch (const std::exception&) {
      throw ConfigError("config: '" + act_key + "': unknown activation '" +
                        act + "'");
    }
    cfg.layers.push_back(layer);
  }
  if (cfg.layers.empty())
    throw ConfigError("config: model.* given but no model.layer1.dims");
  cfg.validate();
  model = cfg;
}

RunConfig parse_config_keyvalues(KeyValues kv) {
  RunConfig cfg;
  parse_model(kv, cfg.model);
  kv.take_if("init.seed", [&](const std::string& v) {
    cfg.init_seed = parse_u64("init.seed", v);
  });

  kv.take_if("optimizer.method", [&](const std::string& v) {
    if (v == "adam")
      cfg.optimizer.method = OptimMethod::adam;
    else if (v == "gd")
      cfg.optimizer.method = OptimMethod::gd;
    else
      throw ConfigError("config: optimizer.method must be adam or gd, got '" +
                        v + "'");
  });
  kv.take_if("optimizer.learning_rate", [&](const std::string& v) {
    cfg.optimizer.learning_rate = parse_num("optimizer.learning_rate", v);
  });
  kv.take_if("optimizer.beta1", [&](const std::string& v) {
    cfg.optimizer.beta1 = parse_num("optimizer.beta1", v);
  });
  kv.take_if("optimizer.beta2", [&](const std::string& v) {
    cfg.optimizer.beta2 = parse_num("optimizer.beta2", v);
  });
  kv.take_if("optimizer.epsilon", [&](const std::string& v) {
    cfg.optimizer.epsilon = parse_num("optimizer.epsilon", v);
  });
  kv.take_if("optimizer.max_iters", [&](const std::string& v) {
    cfg.optimizer.max_iters = parse_int("optimizer.max_iters", v);
  });
  kv.take_if("optimizer.stop_threshold", [&](const std::string& v) {
    cfg.optimizer.stop_threshold = parse_num("optimizer.stop_threshold", v);
  });
  kv.take_if("optimizer.record_stride", [&](const std::string& v) {
    cfg.optimizer.record_stride = parse_int("optimizer.record_stride", v);
  });
  cfg.optimizer.validate();

  kv.take_if("loss.lambda", [&](const std::string& v) {
    cfg.loss.lambda = parse_num("loss.lambda", v);
  });
  kv.take_if("loss.regularizer", [&](const std::string& v) {
    if (v == "none")
      cfg.loss.reg = Regularizer::none;
    else if (v == "tv")
      cfg.loss.reg = Regularizer::tv;
    else
      throw ConfigError("config: loss.regularizer must be none or tv, got '" +
                        v + "'");
  });
  cfg.loss.validate();

  kv.take_if("sampling.rho", [&](const std::string& v) {
    cfg.sampling.rho = parse_num("sampling.rho", v);
  });
  kv.take_if("sampling.seed", [&](const std::string& v) {
    cfg.sampling.seed = parse_u64("sampling.seed", v);
  });
  kv.take_if("noise.sigma", [&](const std::string& v) {
    cfg.noise.sigma = parse_num("noise.sigma", v);
  });
  kv.take_if("noise.seed", [&](const std::string& v) {
    cfg.noise.seed = parse_u64("noise.seed", v);
  });

  kv.take_if("field.grid", [&](const std::string& v) { cfg.field.grid_path = v; });
  kv.take_if("field.synth_seed", [&](const std::string& v) {
    cfg.field.synth_seed = parse_u64("field.synth_seed", v);
  });
  kv.take_if("field.shape", [&](const std::string& v) {
    cfg.field.shape = parse_dims("field.shape", v);
  });

  kv.take_if("tucker.core_dims", [&](const std::string& v) {
    cfg.tucker.core_dims = parse_dims("tucker.core_dims", v);
  });
  kv.take_if("tucker.max_sweeps", [&](const std::string& v) {
    cfg.tucker.max_sweeps = static_cast<int>(parse_int("tucker.max_sweeps", v));
  });
  kv.take_if("tucker.tol", [&](const std::string& v) {
    cfg.tucker.tol = parse_num("tucker.tol", v);
  });
  kv.take_if("tucker.seed", [&](const std::string& v) {
    cfg.tucker.seed = parse_u64("tucker.seed", v);
  });

  kv.take_if("spline.green", [&](const std::string& v) {
    if (v != "distance")
      throw ConfigError("config: spline.green must be distance, got '" + v + "'");
    cfg.spline_green = GreenFn::distance;
  });
  kv.take_if("spline.ridge", [&](const std::string& v) {
    cfg.spline_ridge = parse_num("spline.ridge", v);
  });

  kv.take_if("sweep.methods", [&](const std::string& v) {
    cfg.sweep_methods = split_ws(v);
    if (cfg.sweep_methods.empty())
      throw ConfigError("config: sweep.methods is empty");
  });
  kv.take_if("sweep.rhos", [&](const std::string& v) {
    cfg.sweep_rhos.clear();
    for (const auto& tok : split_ws(v))
      cfg.sweep_rhos.push_back(parse_num("sweep.rhos", tok));
    if (cfg.sweep_rhos.empty()) throw ConfigError("config: sweep.rhos is empty");
  });
  kv.take_if("sweep.sigmas", [&](const std::string& v) {
    cfg.sweep_sigmas.clear();
    for (const auto& tok : split_ws(v))
      cfg.sweep_sigmas.push_back(parse_num("sweep.sigmas", tok));
    if (cfg.sweep_sigmas.empty())
      throw ConfigError("config: sweep.sigmas is empty");
  });
  kv.take_if("sweep.seeds", [&](const std::string& v) {
    cfg.sweep_seeds.clear();
    for (const auto& tok : split_ws(v))
      cfg.sweep_seeds.push_back(parse_u64("sweep.seeds", tok));
    if (cfg.sweep_seeds.empty()) throw ConfigError("config: sweep.seeds is empty");
  });

  kv.reject_unknown();
  return cfg;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  return parse_config_keyvalues(KeyValues(text));
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config_text(buf.str());
}

std::string model_config_to_text(const ModelConfig& model) {
  std::ostringstream out;
  out << "model.core_dims = " << model.core_dims[0] << " " << model.core_dims[1]
      << " " << model.core_dims[2] << "\n";
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    out << "model.layer" << l + 1 << ".dims = " << layer.out_dims[0] << " "
        << layer.out_dims[1] << " " << layer.out_dims[2] << "\n";
    out << "model.layer" << l + 1 << ".activation = " << to_string(layer.act)
        << "\n";
  }
  return out.str();
}

std::string config_echo(const ModelConfig& model, const OptimizerConfig& opt,
                        const LossSpec& loss) {
  std::ostringstream out;
  out << "core=" << model.core_dims[0] << "x" << model.core_dims[1] << "x"
      << model.core_dims[2] << ";layers=";
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    if (l) out << ",";
    out << model.layers[l].out_dims[0] << "x" << model.layers[l].out_dims[1]
        << "x" << model.layers[l].out_dims[2] << ":"
        << to_string(model.layers[l].act);
  }
  out << ";opt=" << (opt.method == OptimMethod::adam ? "adam" : "gd")
      << ";lr=" << opt.learning_rate << ";iters=" << opt.max_iters
      << ";lambda=" << loss.lambda
      << ";reg=" << (loss.reg == Regularizer::tv ? "tv" : "none");
  return out.str();
}

}  // namespace tensorfield
