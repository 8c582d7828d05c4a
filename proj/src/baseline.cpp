#include "pointgwr/baseline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace pointgwr {

namespace {

double cross(const Vec2d& a, const Vec2d& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_area(const std::vector<Vec2d>& poly) {
  double twice = 0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  return std::abs(twice) / 2;
}

// Part of a convex polygon on the side where side(p) >= 0.
std::vector<Vec2d> clip(const std::vector<Vec2d>& poly, const Vec2d& origin, const Vec2d& dir,
                        double sign) {
  std::vector<Vec2d> out;
  auto side = [&](const Vec2d& p) { return sign * cross(dir, p - origin); };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2d& cur = poly[i];
    const Vec2d& nxt = poly[(i + 1) % poly.size()];
    const double sc = side(cur), sn = side(nxt);
    if (sc >= 0) out.push_back(cur);
    if ((sc > 0 && sn < 0) || (sc < 0 && sn > 0)) out.push_back(cur + (nxt - cur) * (sc / (sc - sn)));
  }
  return out;
}

}  // namespace

PointingRay pointing_ray(const FingerPoints& pts) {
  const Vec2d origin = (pts.flank_a + pts.flank_b) / 2;
  const Vec2d d = pts.tip - origin;
  const double len = d.norm();
  if (!(len > 1e-12)) throw ContractError("pointing_ray: fingertip coincides with finger base");
  return {origin, pts.tip, d / len};
}

std::optional<ChordHit> chord_hit(const PointingRay& ray, const BoxLabel& box) {
  if (!box.valid()) return std::nullopt;
  const std::vector<Vec2d> corners{{box.x1, box.y1}, {box.x2, box.y1}, {box.x2, box.y2}, {box.x1, box.y2}};

  // Slab test: parameter interval of the supporting line inside the box.
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  const std::array<double, 2> lo{box.x1, box.y1}, hi{box.x2, box.y2};
  for (int k = 0; k < 2; ++k) {
    const double o = ray.origin[k], d = ray.direction[k];
    if (d == 0) {
      if (o < lo[k] || o > hi[k]) return std::nullopt;
      continue;
    }
    double a = (lo[k] - o) / d, b = (hi[k] - o) / d;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  if (t0 > t1 || t1 < 0) return std::nullopt;

  const double pos = polygon_area(clip(corners, ray.origin, ray.direction, 1.0));
  const double neg = polygon_area(clip(corners, ray.origin, ray.direction, -1.0));
  const double big = std::max(pos, neg);
  const double phi = big > 0 ? std::min(pos, neg) / big : 0.0;
  return ChordHit{std::clamp(phi, 0.0, 1.0), t0};
}

std::optional<TargetHit> select_target(const PointingRay& ray, std::span<const DetectedObject> objects,
                                       double min_phi) {
  std::optional<TargetHit> best;
  double best_t = 0;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto hit = chord_hit(ray, objects[i].bbox);
    if (!hit || hit->phi < min_phi) continue;
    if (!best || hit->phi > best->phi || (hit->phi == best->phi && hit->t_enter < best_t)) {
      best = TargetHit{i, hit->phi};
      best_t = hit->t_enter;
    }
  }
  return best;
}

}  // namespace pointgwr
