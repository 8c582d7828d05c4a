#include "pointgwr/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace pointgwr {

namespace {

// Clockwise on screen (y down), starting east.
constexpr std::array<std::array<int, 2>, 8> kRing{{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

double cross(const Vec2d& o, const Vec2d& a, const Vec2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

Components connected_components(const Mask& mask) {
  const int h = static_cast<int>(mask.rows()), w = static_cast<int>(mask.cols());
  Components out;
  out.labels.setZero(h, w);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(y, x) == 0 || out.labels(y, x) != 0) continue;
      const int label = static_cast<int>(out.list.size()) + 1;
      Component c{0, x, y, x, y, x, y};
      stack.assign(1, {x, y});
      out.labels(y, x) = label;
      while (!stack.empty()) {
        const auto [px, py] = stack.back();
        stack.pop_back();
        ++c.area;
        c.min_x = std::min(c.min_x, px);
        c.max_x = std::max(c.max_x, px);
        c.min_y = std::min(c.min_y, py);
        c.max_y = std::max(c.max_y, py);
        for (const auto& [dx, dy] : kRing) {
          const int nx = px + dx, ny = py + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (mask(ny, nx) == 0 || out.labels(ny, nx) != 0) continue;
          out.labels(ny, nx) = label;
          stack.emplace_back(nx, ny);
        }
      }
      out.list.push_back(c);
    }
  }
  return out;
}

Contour trace_outer_contour(const Mask& mask, int seed_x, int seed_y) {
  const int h = static_cast<int>(mask.rows()), w = static_cast<int>(mask.cols());
  auto fg = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && mask(y, x) != 0; };
  if (!fg(seed_x, seed_y)) throw ContractError("trace_outer_contour: seed is background");

  auto ring_index = [](int dx, int dy) {
    for (int i = 0; i < 8; ++i)
      if (kRing[i][0] == dx && kRing[i][1] == dy) return i;
    return 0;
  };

  Contour contour{Vec2d(seed_x, seed_y)};
  int px = seed_x, py = seed_y;
  int bx = seed_x - 1, by = seed_y;  // backtrack: the west neighbor is background
  const std::size_t limit = static_cast<std::size_t>(w) * h * 4 + 8;
  while (contour.size() < limit) {
    const int k = ring_index(bx - px, by - py);
    int nx = -1, ny = -1, nbx = bx, nby = by;
    for (int i = 1; i <= 8; ++i) {
      const auto& d = kRing[(k + i) % 8];
      if (fg(px + d[0], py + d[1])) {
        nx = px + d[0];
        ny = py + d[1];
        const auto& prev = kRing[(k + i - 1) % 8];
        nbx = px + prev[0];
        nby = py + prev[1];
        break;
      }
    }
    if (nx < 0) break;  // isolated pixel
    if (px == seed_x && py == seed_y && contour.size() > 1 && contour[1] == Vec2d(nx, ny)) {
      contour.pop_back();
      break;
    }
    px = nx;
    py = ny;
    bx = nbx;
    by = nby;
    contour.emplace_back(px, py);
  }
  return contour;
}

std::vector<int> convex_hull_indices(std::span<const Vec2d> points) {
  const int n = static_cast<int>(points.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& pa = points[a];
    const auto& pb = points[b];
    return std::tie(pa.x(), pa.y(), a) < std::tie(pb.x(), pb.y(), b);
  });

  std::vector<int> hull;
  if (n == 0) return hull;
  std::vector<int> chain(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(points[chain[k - 2]], points[chain[k - 1]], points[order[i]]) <= 0) --k;
    chain[k++] = order[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && cross(points[chain[k - 2]], points[chain[k - 1]], points[order[i]]) <= 0) --k;
    chain[k++] = order[i];
  }
  chain.resize(std::max(k - 1, 1));

  // Report each hull point by its first occurrence in the input.
  std::map<std::pair<double, double>, int> first;
  for (int i = n - 1; i >= 0; --i) first[{points[i].x(), points[i].y()}] = i;
  for (int idx : chain) hull.push_back(first.at({points[idx].x(), points[idx].y()}));
  std::sort(hull.begin(), hull.end());
  hull.erase(std::unique(hull.begin(), hull.end()), hull.end());
  return hull;
}

std::vector<ConvexityDefect> convexity_defects(std::span<const Vec2d> contour,
                                               std::span<const int> hull) {
  std::vector<ConvexityDefect> out;
  const int n = static_cast<int>(contour.size());
  if (hull.size() < 3) return out;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const int s = hull[i];
    const int e = hull[(i + 1) % hull.size()];
    const Vec2d a = contour[s], b = contour[e];
    const Vec2d ab = b - a;
    const double len = ab.norm();
    ConvexityDefect d{s, e, s, 0.0};
    for (int j = (s + 1) % n; j != e; j = (j + 1) % n) {
      const double depth = len > 0 ? std::abs(cross(a, b, contour[j])) / len : (contour[j] - a).norm();
      if (depth > d.depth) {
        d.depth = depth;
        d.farthest = j;
      }
    }
    if (d.depth > 0) out.push_back(d);
  }
  return out;
}

double vertex_angle_degrees(const Vec2d& p0, const Vec2d& p1, const Vec2d& p2) {
  const double a2 = (p1 - p2).squaredNorm();
  const double b = (p1 - p0).norm(), c = (p2 - p0).norm();
  if (b == 0 || c == 0) return 180.0;
  const double cosv = std::clamp((b * b + c * c - a2) / (2 * b * c), -1.0, 1.0);
  return std::acos(cosv) * 180.0 / 3.14159265358979323846;
}

std::vector<int> single_linkage(std::span<const Vec2d> points, double cutoff) {
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((points[i] - points[j]).norm() < cutoff) parent[find(i)] = find(j);

  std::vector<int> labels(n);
  std::map<std::size_t, int> numbering;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    auto it = numbering.try_emplace(root, static_cast<int>(numbering.size())).first;
    labels[i] = it->second;
  }
  return labels;
}

Vec2d polygon_centroid(std::span<const Vec2d> polygon) {
  if (polygon.empty()) throw ContractError("polygon_centroid: empty polygon");
  // Shift to the first vertex to keep the shoelace sums well conditioned.
  const Vec2d o = polygon.front();
  double a2 = 0, cx = 0, cy = 0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2d p = polygon[i] - o;
    const Vec2d q = polygon[(i + 1) % polygon.size()] - o;
    const double c = p.x() * q.y() - q.x() * p.y();
    a2 += c;
    cx += (p.x() + q.x()) * c;
    cy += (p.y() + q.y()) * c;
  }
  if (std::abs(a2) < 1e-12) {
    Vec2d mean = Vec2d::Zero();
    for (const auto& p : polygon) mean += p;
    return mean / static_cast<double>(polygon.size());
  }
  return o + Vec2d(cx / (3 * a2), cy / (3 * a2));
}

}  // namespace pointgwr
