#include "pointgwr/vision.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pointgwr {

namespace {

std::uint8_t round_clamp(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

struct Span {
  double lo, hi;
};

std::vector<Span> hue_spans(const HueRange& r) {
  if (r.h_min <= r.h_max) return {{r.h_min, r.h_max}};
  return {{r.h_min, 360.0}, {0.0, r.h_max}};
}

}  // namespace

YCbCr rgb_to_ycbcr(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double R = r, G = g, B = b;
  return {round_clamp(0.299 * R + 0.587 * G + 0.114 * B),
          round_clamp(128.0 - 0.168736 * R - 0.331264 * G + 0.5 * B),
          round_clamp(128.0 + 0.5 * R - 0.418688 * G - 0.081312 * B)};
}

bool SkinModel::is_skin(std::uint8_t cb, std::uint8_t cr) const {
  const std::uint64_t s = skin(cb, cr), n = nonskin(cb, cr);
  if (n == 0) return s > 0;
  // (s / Ts) / (n / Tn) >= theta without dividing.
  const long double lhs = static_cast<long double>(s) * total_nonskin;
  const long double rhs = static_cast<long double>(theta) * n * total_skin;
  return lhs >= rhs;
}

void SkinModel::validate() const {
  if (skin_hist.size() != kBins || nonskin_hist.size() != kBins)
    throw DataError("skin model: histograms must have 256x256 bins");
  if (!(theta > 0) || !std::isfinite(theta)) throw DataError("skin model: theta must be positive");
  const auto ts = std::accumulate(skin_hist.begin(), skin_hist.end(), std::uint64_t{0});
  const auto tn = std::accumulate(nonskin_hist.begin(), nonskin_hist.end(), std::uint64_t{0});
  if (ts != total_skin || tn != total_nonskin)
    throw DataError("skin model: totals disagree with histogram sums");
}

SkinModel fit_skin_model(std::span<const ChromaPixel> skin, std::span<const ChromaPixel> nonskin,
                         double theta) {
  if (skin.empty() || nonskin.empty())
    throw ContractError("fit_skin_model: both pixel classes must be non-empty");
  if (!(theta > 0) || !std::isfinite(theta)) throw ContractError("fit_skin_model: theta must be positive");
  SkinModel m;
  m.theta = theta;
  for (const auto& p : skin) ++m.skin_hist[SkinModel::bin(p.cb, p.cr)];
  for (const auto& p : nonskin) ++m.nonskin_hist[SkinModel::bin(p.cb, p.cr)];
  m.total_skin = skin.size();
  m.total_nonskin = nonskin.size();
  return m;
}

SkinModel fit_skin_model(const RgbImage& image, const Mask& annotation, double theta) {
  if (annotation.rows() != image.height || annotation.cols() != image.width)
    throw ContractError("fit_skin_model: annotation size differs from image");
  std::vector<ChromaPixel> skin, nonskin;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const auto* p = image.at(x, y);
      const auto c = rgb_to_ycbcr(p[0], p[1], p[2]);
      (annotation(y, x) != 0 ? skin : nonskin).push_back({c.cb, c.cr});
    }
  }
  return fit_skin_model(skin, nonskin, theta);
}

Mask classify_skin(const SkinModel& model, const RgbImage& image) {
  std::vector<std::uint8_t> lut(SkinModel::kBins);
  for (int cb = 0; cb < 256; ++cb)
    for (int cr = 0; cr < 256; ++cr)
      lut[SkinModel::bin(cb, cr)] = model.is_skin(cb, cr) ? 255 : 0;

  Mask mask = Mask::Zero(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const auto* p = image.at(x, y);
      const auto c = rgb_to_ycbcr(p[0], p[1], p[2]);
      mask(y, x) = lut[SkinModel::bin(c.cb, c.cr)];
    }
  }
  return mask;
}

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double R = r / 255.0, G = g / 255.0, B = b / 255.0;
  const double mx = std::max({R, G, B}), mn = std::min({R, G, B});
  const double d = mx - mn;
  Hsv out{0, mx > 0 ? d / mx : 0, mx};
  if (d > 0) {
    double h;
    if (mx == R)
      h = 60.0 * std::fmod((G - B) / d, 6.0);
    else if (mx == G)
      h = 60.0 * ((B - R) / d + 2.0);
    else
      h = 60.0 * ((R - G) / d + 4.0);
    if (h < 0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
  }
  return out;
}

bool HueRange::contains(const Hsv& p) const {
  if (p.s < s_min || p.v < v_min) return false;
  for (const auto& sp : hue_spans(*this))
    if (p.h >= sp.lo && p.h < sp.hi) return true;
  return false;
}

void validate_hue_ranges(std::span<const HueRange> ranges) {
  for (const auto& r : ranges) {
    if (!(r.h_min >= 0 && r.h_min < 360 && r.h_max >= 0 && r.h_max <= 360))
      throw ContractError("hue range '" + r.name + "': hue bounds must lie in [0, 360]");
    if (r.h_min == r.h_max) throw ContractError("hue range '" + r.name + "' is empty");
    if (!(r.s_min >= 0 && r.s_min <= 1 && r.v_min >= 0 && r.v_min <= 1))
      throw ContractError("hue range '" + r.name + "': s_min and v_min must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < ranges.size(); ++i)
    for (std::size_t j = i + 1; j < ranges.size(); ++j)
      for (const auto& a : hue_spans(ranges[i]))
        for (const auto& b : hue_spans(ranges[j]))
          if (a.lo < b.hi && b.lo < a.hi)
            throw ContractError("hue ranges '" + ranges[i].name + "' and '" + ranges[j].name +
                                "' overlap");
}

std::vector<HueRange> default_hue_ranges() {
  return {{"red", 340, 20, 0.5, 0.3},
          {"yellow", 45, 75, 0.5, 0.3},
          {"green", 90, 150, 0.5, 0.3},
          {"blue", 200, 260, 0.5, 0.3}};
}

Mask color_mask(const RgbImage& image, const HueRange& range) {
  Mask mask = Mask::Zero(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const auto* p = image.at(x, y);
      if (range.contains(rgb_to_hsv(p[0], p[1], p[2]))) mask(y, x) = 255;
    }
  }
  return mask;
}

std::vector<DetectedObject> segment_color_objects(const RgbImage& image,
                                                  std::span<const HueRange> ranges,
                                                  std::size_t min_area) {
  validate_hue_ranges(ranges);
  std::vector<DetectedObject> out;
  for (const auto& range : ranges) {
    const auto comps = connected_components(color_mask(image, range));
    for (const auto& c : comps.list)
      if (c.area >= min_area) out.push_back({range.name, c.bbox()});
  }
  return out;
}

std::optional<FingertipGeometry> detect_fingertip(const Mask& mask, const FingertipParams& p) {
  const auto comps = connected_components(mask);
  if (comps.list.empty()) return std::nullopt;
  const auto largest = std::max_element(comps.list.begin(), comps.list.end(),
                                        [](const Component& a, const Component& b) { return a.area < b.area; });

  FingertipGeometry g;
  // Restrict tracing to the chosen component so touching blobs cannot leak in.
  const int label = static_cast<int>(largest - comps.list.begin()) + 1;
  const Mask only = (comps.labels == label).cast<std::uint8_t>() * std::uint8_t{255};
  g.contour = trace_outer_contour(only, largest->seed_x, largest->seed_y);
  const int n = static_cast<int>(g.contour.size());
  if (n < 3) return std::nullopt;

  g.hull = convex_hull_indices(g.contour);
  for (const auto& d : convexity_defects(g.contour, g.hull))
    if (d.depth >= p.defect_depth) g.defects.push_back(d);
  g.centroid = polygon_centroid(g.contour);

  struct Candidate {
    int index;
    Vec2d p0, p1, p2;
    double delta;
  };
  std::vector<Candidate> cands;
  const int k = std::min(p.neighbor_step, (n - 1) / 2);
  if (k < 1) return std::nullopt;
  for (int i : g.hull) {
    const Vec2d& p0 = g.contour[i];
    const Vec2d& p1 = g.contour[(i - k + n) % n];
    const Vec2d& p2 = g.contour[(i + k) % n];
    const double delta = vertex_angle_degrees(p0, p1, p2);
    if (delta < p.max_angle) cands.push_back({i, p0, p1, p2, delta});
  }
  if (cands.empty()) return std::nullopt;

  std::vector<Vec2d> pts;
  for (const auto& c : cands) pts.push_back(c.p0);
  const auto labels = single_linkage(pts, p.cluster_cutoff);
  const int n_clusters = *std::max_element(labels.begin(), labels.end()) + 1;

  struct Cluster {
    Vec2d tip, flank_a, flank_b;
    double delta, reach;
  };
  std::vector<Cluster> clusters;
  for (int c = 0; c < n_clusters; ++c) {
    Vec2d apex = Vec2d::Zero(), fa = Vec2d::Zero(), fb = Vec2d::Zero();
    int count = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (labels[i] != c) continue;
      apex += cands[i].p0;
      fa += cands[i].p1;
      fb += cands[i].p2;
      ++count;
    }
    apex /= count;
    // The tip is the member hull vertex closest to the cluster's mean apex.
    const Candidate* best = nullptr;
    double best_d = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (labels[i] != c) continue;
      const double d = (cands[i].p0 - apex).squaredNorm();
      if (!best || d < best_d) {
        best = &cands[i];
        best_d = d;
      }
    }
    clusters.push_back({best->p0, fa / count, fb / count, best->delta, (best->p0 - g.centroid).norm()});
  }

  double max_reach = 0;
  for (const auto& c : clusters) max_reach = std::max(max_reach, c.reach);
  const Cluster* accepted = nullptr;
  for (const auto& c : clusters) {
    if (c.reach < p.extension_ratio * max_reach) continue;
    if (accepted) return std::nullopt;
    accepted = &c;
  }
  if (!accepted || accepted->flank_a == accepted->flank_b) return std::nullopt;

  g.tip = accepted->tip;
  g.flank_a = accepted->flank_a;
  g.flank_b = accepted->flank_b;
  g.delta = accepted->delta;
  return g;
}

double pointing_angle(std::span<const Vec2d> contour, const Vec2d& tip, double weight_scale) {
  if (contour.empty()) throw ContractError("pointing_angle: empty contour");
  if (!(weight_scale > 0)) throw ContractError("pointing_angle: weight scale must be positive");
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto& q : contour) {
    const Vec2d d = q - tip;
    scatter += std::exp(-d.norm() / weight_scale) * d * d.transpose();
  }
  if (scatter.isZero(0.0)) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
  Vec2d axis = eig.eigenvectors().col(1);
  // Snap exact axis-aligned solutions so degenerate inputs fold cleanly.
  if (std::abs(axis.y()) < 1e-15) axis = {1, 0};
  if (std::abs(axis.x()) < 1e-15) axis = {0, 1};
  return inclination_degrees(axis);
}

FeatureVector features_from_geometry(const FingertipGeometry& g, const FingertipParams& p) {
  return {pointing_angle(g.contour, g.tip, p.weight_scale), g.centroid.x(), g.centroid.y(),
          g.tip.x(), g.tip.y()};
}

std::optional<FeatureVector> extract_features(const Mask& mask, const FingertipParams& p) {
  const auto g = detect_fingertip(mask, p);
  if (!g) return std::nullopt;
  return features_from_geometry(*g, p);
}

}  // namespace pointgwr
