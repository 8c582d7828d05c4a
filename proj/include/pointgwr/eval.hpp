#pragma once

#include "pointgwr/baseline.hpp"
#include "pointgwr/gwr.hpp"
#include "pointgwr/prediction.hpp"
#include "pointgwr/scene.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pointgwr {

enum class Outcome : std::uint8_t {
  TruePositive,      // TP
  WrongObject,       // FP and FN
  Miss,              // FN and miss
  CorrectRejection,  // noise sample rejected
  FalseAlarm,        // FP on a noise sample
};

const char* to_string(Outcome o);

/// What a frame was supposed to resolve to; `target` is empty for noise.
struct GroundTruth {
  std::optional<BoxLabel> target;
  AmbiguityClass ambiguity{AmbiguityClass::None};
  std::size_t n_objects{1};
};

GroundTruth ground_truth(const FrameRecord& f, const Scene& scene);

struct OutcomeRecord {
  Outcome outcome{Outcome::Miss};
  AmbiguityClass ambiguity{AmbiguityClass::None};
  bool real_target{true};
  bool noise_predicted{false};  // FDN when real_target
  bool ambiguity_flagged{false};
  bool multi_object{false};
  double iou{0};  // predicted vs intended box, 0 when nothing was returned
};

inline constexpr double kHitIou = 0.5;

/// Object mode: the prediction names an object from `objects`.
OutcomeRecord classify_outcome(const Prediction& p, std::span<const DetectedObject> objects,
                               const GroundTruth& truth);

/// Position mode: the BMU label itself is compared with the intended box.
OutcomeRecord classify_position(const Prediction& p, const GroundTruth& truth);

/// Pointing-ray baseline in object mode.
OutcomeRecord classify_baseline(const std::optional<TargetHit>& hit,
                                std::span<const DetectedObject> objects, const GroundTruth& truth);

struct Counts {
  std::size_t frames{0};
  std::size_t real{0};  // frames with a real target
  std::size_t tp{0}, fp{0}, fn{0}, miss{0};
  std::size_t correct_rejections{0}, false_alarms{0};
  std::size_t cda{0}, multi_object{0};
  std::size_t fdn{0};
  double iou_sum{0};

  void add(const OutcomeRecord& r);
  Counts& operator+=(const Counts& o);
};

struct Metrics {
  double precision{0}, recall{0}, f1{0};
  double miss{0};  // percent of real targets
  double mean_iou{0};
  double cda{0};   // percent of multi-object frames flagged ambiguous
  double fdn{0};   // percent of real targets rejected as noise
};

/// Percentages in [0, 100]; ratios with a zero denominator are 0.
Metrics metrics_from(const Counts& c);

struct ClassReport {
  Counts counts;
  Metrics metrics;
};

struct EvalReport {
  std::map<std::string, ClassReport> classes;  // keyed by class name
  ClassReport total;                           // every class except "none"
  ClassReport none;
};

/// Throws ContractError on empty input.
EvalReport compute_metrics(std::span<const OutcomeRecord> outcomes);

/// Ratios rounded to two decimals as printed in reports.
double round2(double v);

enum class EvalMode { Objects, Positions };

struct EvalOptions {
  EvalMode mode{EvalMode::Objects};
  int eval_frame{40};  // objects mode; negative evaluates every frame
  PredictOptions predict;
};

std::vector<OutcomeRecord> evaluate_gwr(const Network& net, const Dataset& ds,
                                        std::span<const std::uint32_t> scene_ids,
                                        const EvalOptions& opt = {});

std::vector<OutcomeRecord> evaluate_baseline(const Dataset& ds, std::span<const std::uint32_t> scene_ids,
                                             const EvalOptions& opt = {},
                                             double min_phi = kMinHitQuality);

std::vector<Observation<double>> training_set(const Dataset& ds, std::span<const std::uint32_t> scene_ids,
                                              const FeatureSpace& space);

std::vector<std::uint32_t> all_scene_ids(const Dataset& ds);

/// Scene-disjoint folds, balanced per class; returns the fold of each scene.
std::vector<int> assign_folds(const Dataset& ds, int folds, std::uint64_t seed);

struct MeanStd {
  double mean{0}, std{0};  // population std
};

MeanStd mean_std(std::span<const double> v);

struct AggregateRow {
  MeanStd precision, recall, f1, miss, mean_iou, cda, fdn;
};

struct FoldResult {
  int fold{0};
  std::size_t nodes{0}, edges{0};
  double quantization_error{0};
  EvalReport report;
};

struct CrossvalResult {
  double a_T{0};
  int epochs{0};
  std::vector<FoldResult> folds;
  std::map<std::string, AggregateRow> classes;
  AggregateRow total;
  AggregateRow none;
  MeanStd nodes, quantization_error;
};

struct CrossvalConfig {
  GwrParams<double> params;
  FeatureSpace space;
  int folds{3};
  int epochs{30};
  std::uint64_t seed{42};
  EvalOptions eval;
  int workers{1};
};

CrossvalResult crossval(const Dataset& ds, const CrossvalConfig& cfg);

struct SweepConfig {
  CrossvalConfig base;
  std::vector<double> a_T{0.85, 0.90, 0.95};
  std::vector<int> epochs{30, 50, 100};
};

/// One result per (a_T, epochs) cell, a_T-major. Each (a_T, fold) pair is
/// trained once to the largest epoch count and snapshotted on the way.
std::vector<CrossvalResult> sweep(const Dataset& ds, const SweepConfig& cfg);

/// Baseline over scene-disjoint folds so its spread is comparable.
CrossvalResult crossval_baseline(const Dataset& ds, const CrossvalConfig& cfg);

/// Training seed for a fold; identical across a_T values.
std::uint64_t fold_seed(std::uint64_t seed, int fold);

}  // namespace pointgwr
