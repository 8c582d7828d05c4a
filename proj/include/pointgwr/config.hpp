#pragma once

#include "pointgwr/eval.hpp"
#include "pointgwr/scene.hpp"
#include "pointgwr/vision.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pointgwr {

struct RunConfig {
  std::uint64_t seed{42};
  std::filesystem::path dataset_path{"dataset.bin"};
  std::filesystem::path model_path{"model.json"};
  std::filesystem::path report_dir{"report"};
  GwrParams<double> gwr;
  FeatureSpace space;
  DatasetSpec dataset;
  int folds{3};
  int epochs{30};
  EvalOptions eval;
  std::vector<double> sweep_a_T{0.85, 0.90, 0.95};
  std::vector<int> sweep_epochs{30, 50, 100};
  std::vector<HueRange> hue_ranges = default_hue_ranges();
  FingertipParams fingertip;
  double skin_theta{5.0};
  int workers{0};  // 0 = available parallelism
  bool json_output{false};

  void validate() const;
  int worker_count() const;
  CrossvalConfig crossval_config() const;
};

/// Parses TOML text; relative paths resolve against `base_dir`. Every
/// section is optional except the top-level `seed`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Stable digest of the file contents, embedded in reports.
std::string config_digest(const std::string& text);

}  // namespace pointgwr
