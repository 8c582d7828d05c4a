#pragma once

#include "pointgwr/gwr.hpp"
#include "pointgwr/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace pointgwr {

using Network = GwrNetwork<double>;

/// Number of node labels united into the area A: ceil(0.01 n + 5).
inline std::size_t label_budget(std::size_t n_nodes) { return (n_nodes + 599) / 100; }

enum class PredictionKind { Noise, Resolved, Ambiguous };

const char* to_string(PredictionKind k);

struct ObjectMatch {
  std::size_t index{0};  // position in the object list passed to predict
  std::string color;
  double iou_area{0};    // IoU against the union area A
  double iou_bmu{0};     // IoU against the BMU label alone
};

struct Prediction {
  PredictionKind kind{PredictionKind::Noise};
  double bmu_activation{0};
  int bmu_id{-1};
  BoxLabel bmu_label;
  std::optional<BoxLabel> area;           // absent for Noise
  std::size_t labels_used{0};
  std::vector<ObjectMatch> matched;       // candidates, best first

  const ObjectMatch* best() const { return matched.empty() ? nullptr : &matched.front(); }
};

struct PredictOptions {
  double noise_T{0.5};
  double match_iou{0.5};
};

/// Resolves a gesture against the objects in view: noise gate on the BMU
/// activation, union area of the F_A nearest labels, IoU candidate ranking.
Prediction predict(const Network& net, const FeatureVector& v,
                   std::span<const DetectedObject> objects, const PredictOptions& opt = {});

}  // namespace pointgwr
