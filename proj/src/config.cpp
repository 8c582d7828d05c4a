#include "pointgwr/config.hpp"

#include "pointgwr/io.hpp"

#include <toml.hpp>

#include <cstdio>
#include <thread>

namespace pointgwr {

namespace {

template <typename T>
void read_into(const toml::table& t, const char* key, T& out) {
  const auto* node = t.get(key);
  if (!node) return;
  if constexpr (std::is_same_v<T, bool>) {
    const auto v = node->value<bool>();
    if (!v) throw DataError(std::string("config: '") + key + "' must be a boolean");
    out = *v;
  } else if constexpr (std::is_integral_v<T>) {
    const auto v = node->value<std::int64_t>();
    if (!v) throw DataError(std::string("config: '") + key + "' must be an integer");
    out = static_cast<T>(*v);
  } else if constexpr (std::is_floating_point_v<T>) {
    const auto v = node->value<double>();
    if (!v) throw DataError(std::string("config: '") + key + "' must be a number");
    out = *v;
  } else {
    const auto v = node->value<std::string>();
    if (!v) throw DataError(std::string("config: '") + key + "' must be a string");
    out = *v;
  }
}

template <typename T>
void read_list(const toml::table& t, const char* key, std::vector<T>& out) {
  const auto* node = t.get(key);
  if (!node) return;
  const auto* arr = node->as_array();
  if (!arr) throw DataError(std::string("config: '") + key + "' must be an array");
  out.clear();
  for (const auto& el : *arr) {
    std::optional<T> v;
    if constexpr (std::is_integral_v<T>) {
      if (auto i = el.value<std::int64_t>()) v = static_cast<T>(*i);
    } else if constexpr (std::is_floating_point_v<T>) {
      v = el.value<double>();
    } else {
      v = el.value<std::string>();
    }
    if (!v) throw DataError(std::string("config: '") + key + "' has an element of the wrong type");
    out.push_back(*v);
  }
}

const toml::table* section(const toml::table& root, const char* name) {
  const auto* node = root.get(name);
  if (!node) return nullptr;
  const auto* t = node->as_table();
  if (!t) throw DataError(std::string("config: [") + name + "] must be a table");
  return t;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

void RunConfig::validate() const {
  gwr.validate();
  dataset.validate();
  validate_hue_ranges(hue_ranges);
  if (folds < 2) throw ContractError("config: folds must be >= 2");
  if (epochs < 1) throw ContractError("config: epochs must be >= 1");
  if (sweep_a_T.empty() || sweep_epochs.empty()) throw ContractError("config: sweep grids must be non-empty");
  for (double a : sweep_a_T)
    if (!(a > 0 && a < 1)) throw ContractError("config: sweep a_T values must lie in (0, 1)");
  for (int e : sweep_epochs)
    if (e < 1) throw ContractError("config: sweep epochs must be >= 1");
  if (workers < 0) throw ContractError("config: workers must be >= 0");
  if (!(skin_theta > 0)) throw ContractError("config: skin theta must be positive");
}

int RunConfig::worker_count() const {
  if (workers > 0) return workers;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

CrossvalConfig RunConfig::crossval_config() const {
  CrossvalConfig c;
  c.params = gwr;
  c.space = space;
  c.folds = folds;
  c.epochs = epochs;
  c.seed = seed;
  c.eval = eval;
  c.eval.predict.noise_T = gwr.noise_T;
  c.workers = worker_count();
  return c;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw DataError(std::string("config: ") + std::string(e.description()));
  }

  RunConfig c;
  if (!root.contains("seed")) throw DataError("config: 'seed' is required");
  std::int64_t seed = 0;
  read_into(root, "seed", seed);
  c.seed = static_cast<std::uint64_t>(seed);
  c.dataset.seed = c.seed;

  if (const auto* t = section(root, "paths")) {
    std::string s;
    if (t->contains("dataset")) read_into(*t, "dataset", s), c.dataset_path = resolve(base_dir, s);
    if (t->contains("model")) read_into(*t, "model", s), c.model_path = resolve(base_dir, s);
    if (t->contains("report_dir")) read_into(*t, "report_dir", s), c.report_dir = resolve(base_dir, s);
  }
  if (const auto* t = section(root, "gwr")) {
    auto& g = c.gwr;
    read_into(*t, "eta_b", g.eta_b);
    read_into(*t, "eta_n", g.eta_n);
    read_into(*t, "a_T", g.a_T);
    read_into(*t, "h_T", g.h_T);
    read_into(*t, "tau_b", g.tau_b);
    read_into(*t, "tau_n", g.tau_n);
    read_into(*t, "kappa_b", g.kappa_b);
    read_into(*t, "kappa_n", g.kappa_n);
    read_into(*t, "h0", g.h0);
    read_into(*t, "stimulus", g.stimulus);
    read_into(*t, "age_max", g.age_max);
    read_into(*t, "nb_max", g.nb_max);
    read_into(*t, "noise_T", g.noise_T);
    read_into(*t, "adapt_label_size", g.adapt_label_size);
    read_into(*t, "normalize", c.space.normalize);
  }
  if (const auto* t = section(root, "noise")) {
    read_into(*t, "sigma_angle", c.dataset.noise.sigma_angle);
    read_into(*t, "sigma_pos", c.dataset.noise.sigma_pos);
    read_into(*t, "outlier_rate", c.dataset.noise.outlier_rate);
  }
  if (const auto* t = section(root, "dataset")) {
    read_into(*t, "per_scene_frames", c.dataset.per_scene_frames);
    std::vector<std::string> classes;
    read_list(*t, "classes", classes);
    if (!classes.empty()) {
      c.dataset.classes.clear();
      for (const auto& name : classes) {
        try {
          c.dataset.classes.push_back(ambiguity_class_from_string(name));
        } catch (const ContractError& e) {
          throw DataError(std::string("config: ") + e.what());
        }
      }
    }
  }
  if (const auto* t = section(root, "eval")) {
    read_into(*t, "folds", c.folds);
    read_into(*t, "epochs", c.epochs);
    read_into(*t, "eval_frame", c.eval.eval_frame);
    read_into(*t, "match_iou", c.eval.predict.match_iou);
    std::string mode;
    read_into(*t, "mode", mode);
    if (mode == "positions")
      c.eval.mode = EvalMode::Positions;
    else if (mode.empty() || mode == "objects")
      c.eval.mode = EvalMode::Objects;
    else
      throw DataError("config: eval.mode must be 'objects' or 'positions'");
  }
  if (const auto* t = section(root, "sweep")) {
    read_list(*t, "a_T", c.sweep_a_T);
    read_list(*t, "epochs", c.sweep_epochs);
  }
  if (const auto* node = root.get("hue")) {
    const auto* arr = node->as_array();
    if (!arr) throw DataError("config: [[hue]] must be an array of tables");
    c.hue_ranges.clear();
    for (const auto& el : *arr) {
      const auto* t = el.as_table();
      if (!t) throw DataError("config: [[hue]] entries must be tables");
      HueRange r;
      read_into(*t, "name", r.name);
      read_into(*t, "h_min", r.h_min);
      read_into(*t, "h_max", r.h_max);
      read_into(*t, "s_min", r.s_min);
      read_into(*t, "v_min", r.v_min);
      c.hue_ranges.push_back(r);
    }
  }
  if (const auto* t = section(root, "vision")) {
    auto& f = c.fingertip;
    read_into(*t, "neighbor_step", f.neighbor_step);
    read_into(*t, "defect_depth", f.defect_depth);
    read_into(*t, "cluster_cutoff", f.cluster_cutoff);
    read_into(*t, "extension_ratio", f.extension_ratio);
    read_into(*t, "weight_scale", f.weight_scale);
    read_into(*t, "skin_theta", c.skin_theta);
  }
  if (const auto* t = section(root, "run")) {
    read_into(*t, "workers", c.workers);
    read_into(*t, "json", c.json_output);
  }

  try {
    c.validate();
  } catch (const ContractError& e) {
    throw DataError(e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path), path.parent_path());
}

std::string config_digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pointgwr
