#pragma once

#include "pointgwr/image.hpp"
#include "pointgwr/types.hpp"

#include <span>
#include <vector>

namespace pointgwr {

using Contour = std::vector<Vec2d>;

/// A connected foreground region (8-connectivity).
struct Component {
  std::size_t area{0};
  int min_x{0}, min_y{0}, max_x{0}, max_y{0};
  int seed_x{0}, seed_y{0};  // first pixel in raster order
  BoxLabel bbox() const {
    return {double(min_x), double(min_y), double(max_x + 1), double(max_y + 1)};
  }
};

/// Connected components in raster order of their first pixel, plus a label
/// image (0 = background, i + 1 = component i).
struct Components {
  std::vector<Component> list;
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> labels;
};

Components connected_components(const Mask& mask);

/// Ordered outer boundary (clockwise on screen) of the component containing
/// `seed`, which must be that component's first pixel in raster order.
Contour trace_outer_contour(const Mask& mask, int seed_x, int seed_y);

/// Indices into `points` of the convex hull vertices (collinear boundary
/// points excluded), in ascending index order.
std::vector<int> convex_hull_indices(std::span<const Vec2d> points);

struct ConvexityDefect {
  int start{0};     // hull vertex index into the contour
  int end{0};       // next hull vertex index
  int farthest{0};  // deepest contour index between them
  double depth{0};
};

/// Deepest contour point between each pair of consecutive hull vertices.
std::vector<ConvexityDefect> convexity_defects(std::span<const Vec2d> contour,
                                               std::span<const int> hull);

/// Interior angle at p0 of triangle (p0, p1, p2) by the law of cosines, in
/// degrees.
double vertex_angle_degrees(const Vec2d& p0, const Vec2d& p1, const Vec2d& p2);

/// Single-linkage clustering cut at `cutoff`: points whose chain of nearest
/// neighbors stays below the cutoff share a cluster. Returns a label per
/// point, numbered by first appearance.
std::vector<int> single_linkage(std::span<const Vec2d> points, double cutoff);

/// Area centroid of a closed polygon; falls back to the vertex mean when
/// the polygon has no area.
Vec2d polygon_centroid(std::span<const Vec2d> polygon);

}  // namespace pointgwr
