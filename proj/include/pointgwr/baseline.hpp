#pragma once

#include "pointgwr/types.hpp"

#include <optional>
#include <span>

namespace pointgwr {

/// The two finger-flank centroids and the fingertip the ray is built from.
struct FingerPoints {
  Vec2d flank_a{0, 0};  // Psi_11
  Vec2d flank_b{0, 0};  // Psi_12
  Vec2d tip{0, 0};      // rho
};

/// Half-line from the finger-base midpoint through the fingertip.
struct PointingRay {
  Vec2d origin{0, 0};     // Psi_13
  Vec2d through{0, 0};    // rho_1
  Vec2d direction{1, 0};  // unit
};

PointingRay pointing_ray(const FingerPoints& pts);

/// Forward chord of a ray through a box.
struct ChordHit {
  double phi{0};      // min(B1, B2) / max(B1, B2)
  double t_enter{0};  // ray parameter where the line enters the box
};

/// Chord-split quality of a forward hit; nullopt when the ray misses.
std::optional<ChordHit> chord_hit(const PointingRay& ray, const BoxLabel& box);

inline std::optional<double> hit_quality(const PointingRay& ray, const BoxLabel& box) {
  if (auto h = chord_hit(ray, box)) return h->phi;
  return std::nullopt;
}

struct TargetHit {
  std::size_t index{0};
  double phi{0};
};

inline constexpr double kMinHitQuality = 0.2;

/// Object with the highest hit quality at or above `min_phi`; ties go to
/// the object entered first along the ray.
std::optional<TargetHit> select_target(const PointingRay& ray,
                                       std::span<const DetectedObject> objects,
                                       double min_phi = kMinHitQuality);

}  // namespace pointgwr
