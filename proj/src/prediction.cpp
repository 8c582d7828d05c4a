#include "pointgwr/prediction.hpp"

#include <algorithm>
#include <tuple>

namespace pointgwr {

const char* to_string(PredictionKind k) {
  switch (k) {
    case PredictionKind::Noise: return "noise";
    case PredictionKind::Resolved: return "resolved";
    case PredictionKind::Ambiguous: return "ambiguous";
  }
  return "unknown";
}

Prediction predict(const Network& net, const FeatureVector& v,
                   std::span<const DetectedObject> objects, const PredictOptions& opt) {
  if (net.node_count() < 2) throw ContractError("predict: network is not trained");
  const Vec5d x = net.space().map(v);
  const auto nearest = net.nearest(x, label_budget(net.node_count()));

  Prediction p;
  p.bmu_id = nearest.front().first;
  p.bmu_activation = activity(nearest.front().second);
  p.bmu_label = net.node(p.bmu_id).label;
  if (p.bmu_activation < opt.noise_T) {
    p.kind = PredictionKind::Noise;
    return p;
  }

  BoxLabel area = p.bmu_label;
  for (const auto& [id, dist] : nearest) area = bounding_union(area, net.node(id).label);
  p.area = area;
  p.labels_used = nearest.size();

  for (std::size_t i = 0; i < objects.size(); ++i) {
    const ObjectMatch m{i, objects[i].color, iou(area, objects[i].bbox),
                        iou(p.bmu_label, objects[i].bbox)};
    if (std::max(m.iou_area, m.iou_bmu) >= opt.match_iou) p.matched.push_back(m);
  }
  std::stable_sort(p.matched.begin(), p.matched.end(), [](const ObjectMatch& a, const ObjectMatch& b) {
    return std::tie(a.iou_bmu, a.iou_area) > std::tie(b.iou_bmu, b.iou_area);
  });
  p.kind = p.matched.size() >= 2 ? PredictionKind::Ambiguous : PredictionKind::Resolved;
  return p;
}

}  // namespace pointgwr
