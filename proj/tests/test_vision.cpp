#include "pointgwr/contour.hpp"
#include "pointgwr/scene.hpp"
#include "pointgwr/vision.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <set>

using namespace pointgwr;

namespace {

double cross(const Vec2d& o, const Vec2d& a, const Vec2d& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

// Extreme points by testing every candidate edge against every point.
std::vector<int> brute_force_hull(const std::vector<Vec2d>& pts) {
  std::vector<int> firsts;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    bool seen = false;
    for (int j : firsts) seen = seen || pts[j] == pts[i];
    if (!seen) firsts.push_back(i);
  }
  if (firsts.size() < 3) return firsts;
  std::set<int> out;
  for (int i : firsts) {
    for (int j : firsts) {
      if (i == j) continue;
      bool left = true, right = true;
      for (int k : firsts) {
        if (k == i || k == j) continue;
        const double c = cross(pts[i], pts[j], pts[k]);
        if (c == 0) {
          const double t = (pts[k] - pts[i]).dot(pts[j] - pts[i]);
          const bool between = t > 0 && t < (pts[j] - pts[i]).squaredNorm();
          if (!between) left = right = false;
        } else if (c > 0) {
          right = false;
        } else {
          left = false;
        }
      }
      if (left || right) {
        out.insert(i);
        out.insert(j);
      }
    }
  }
  return {out.begin(), out.end()};
}

std::vector<int> naive_linkage(const std::vector<Vec2d>& pts, double cutoff) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> label(n, -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    label[s] = next;
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (int b = 0; b < n; ++b)
        if (label[b] < 0 && (pts[a] - pts[b]).norm() < cutoff) {
          label[b] = next;
          q.push(b);
        }
    }
    ++next;
  }
  return label;
}

Mask random_blob(std::mt19937_64& rng, int size) {
  Mask m = Mask::Zero(size, size);
  std::uniform_int_distribution<int> pos(4, size - 5), rad(2, size / 4);
  for (int i = 0; i < 4; ++i) {
    const int cx = pos(rng), cy = pos(rng), r = rad(rng);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m(y, x) = 255;
  }
  return m;
}

Mask hand_mask(const Vec2d& tip, double angle_deg, int w = 700, int h = 900) {
  const double rad = angle_deg * 3.14159265358979323846 / 180.0;
  const Vec2d dir{std::cos(rad), -std::sin(rad)};
  GestureSample g;
  const Vec2d c = tip - 60.0 * dir;
  g.features = {angle_deg, c.x(), c.y(), tip.x(), tip.y()};
  return render_hand_mask(g, w, h);
}

Mask shift(const Mask& m, int dx, int dy) {
  Mask out = Mask::Zero(m.rows(), m.cols());
  for (int y = 0; y < m.rows(); ++y)
    for (int x = 0; x < m.cols(); ++x) {
      const int sx = x - dx, sy = y - dy;
      if (sx >= 0 && sy >= 0 && sx < m.cols() && sy < m.rows()) out(y, x) = m(sy, sx);
    }
  return out;
}

}  // namespace

TEST(Color, YCbCrKnownValues) {
  const auto w = rgb_to_ycbcr(255, 255, 255);
  EXPECT_EQ(w.y, 255);
  EXPECT_EQ(w.cb, 128);
  EXPECT_EQ(w.cr, 128);
  const auto k = rgb_to_ycbcr(0, 0, 0);
  EXPECT_EQ(k.y, 0);
  EXPECT_EQ(k.cb, 128);
  const auto r = rgb_to_ycbcr(255, 0, 0);
  EXPECT_EQ(r.y, 76);
  EXPECT_EQ(r.cb, 85);
  EXPECT_EQ(r.cr, 255);
}

TEST(Color, HsvPrimaries) {
  EXPECT_DOUBLE_EQ(rgb_to_hsv(255, 0, 0).h, 0.0);
  EXPECT_DOUBLE_EQ(rgb_to_hsv(0, 255, 0).h, 120.0);
  EXPECT_DOUBLE_EQ(rgb_to_hsv(0, 0, 255).h, 240.0);
  EXPECT_DOUBLE_EQ(rgb_to_hsv(255, 0, 255).h, 300.0);
  EXPECT_DOUBLE_EQ(rgb_to_hsv(128, 128, 128).s, 0.0);
}

TEST(Color, HueRangesWrapAndValidate) {
  HueRange red{"red", 340, 20, 0.5, 0.3};
  EXPECT_TRUE(red.contains({350, 1, 1}));
  EXPECT_TRUE(red.contains({5, 1, 1}));
  EXPECT_FALSE(red.contains({20, 1, 1}));
  EXPECT_FALSE(red.contains({5, 0.2, 1}));
  EXPECT_NO_THROW(validate_hue_ranges(default_hue_ranges()));
  std::vector<HueRange> bad{red, {"orange", 10, 40, 0.5, 0.3}};
  EXPECT_THROW(validate_hue_ranges(bad), ContractError);
  std::vector<HueRange> out_of_range{{"x", 10, 400, 0.5, 0.3}};
  EXPECT_THROW(validate_hue_ranges(out_of_range), ContractError);
}

TEST(Skin, RatioRuleAndBoundary) {
  std::vector<ChromaPixel> skin, nonskin;
  // Totals 10 skin / 10 non-skin; bin (100,150) has 5 skin, 1 non-skin: ratio exactly 5.
  for (int i = 0; i < 5; ++i) skin.push_back({100, 150});
  for (int i = 0; i < 5; ++i) skin.push_back({101, 150});
  nonskin.push_back({100, 150});
  for (int i = 0; i < 4; ++i) nonskin.push_back({101, 150});
  for (int i = 0; i < 5; ++i) nonskin.push_back({30, 30});
  const SkinModel m = fit_skin_model(skin, nonskin, 5.0);
  EXPECT_NO_THROW(m.validate());
  EXPECT_TRUE(m.is_skin(100, 150));
  EXPECT_FALSE(m.is_skin(101, 150));
  EXPECT_FALSE(m.is_skin(30, 30));
  EXPECT_FALSE(m.is_skin(0, 0));
  EXPECT_THROW(fit_skin_model({}, nonskin), ContractError);
}

TEST(Skin, ClassifyFromAnnotatedImage) {
  RgbImage img(20, 10);
  Mask ann = Mask::Zero(10, 20);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x) {
      if (x < 10) {
        img.set(x, y, 224, 172, 140);
        ann(y, x) = 255;
      } else {
        img.set(x, y, 40, 90, 200);
      }
    }
  const SkinModel m = fit_skin_model(img, ann);
  const Mask out = classify_skin(m, img);
  EXPECT_TRUE((out == ann).all());
}

TEST(Contour, ComponentsAreEightConnected) {
  Mask m = Mask::Zero(10, 10);
  m(1, 1) = m(2, 2) = 255;  // diagonal neighbors
  m(7, 7) = 255;
  const auto c = connected_components(m);
  ASSERT_EQ(c.list.size(), 2u);
  EXPECT_EQ(c.list[0].area, 2u);
  EXPECT_EQ(c.labels(2, 2), 1);
  EXPECT_EQ(c.labels(7, 7), 2);
}

TEST(Contour, RectangleTraceIsClosedBoundary) {
  Mask m = Mask::Zero(20, 30);
  m.block(5, 4, 6, 10) = 255;
  const auto c = trace_outer_contour(m, 4, 5);
  EXPECT_EQ(c.size(), 2u * (10 - 1) + 2u * (6 - 1));
  EXPECT_EQ(c.front(), Vec2d(4, 5));
  EXPECT_EQ(c[1], Vec2d(5, 5));  // clockwise on screen: east first along the top edge
  for (const auto& p : c) {
    const bool on_edge = p.x() == 4 || p.x() == 13 || p.y() == 5 || p.y() == 10;
    EXPECT_TRUE(on_edge);
  }
  const auto hull = convex_hull_indices(c);
  EXPECT_EQ(hull.size(), 4u);
}

TEST(Contour, HullMatchesBruteForceOnRandomPoints) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> coord(0, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2d> pts(3 + trial % 150);
    for (auto& p : pts) p = {double(coord(rng)), double(coord(rng))};
    EXPECT_EQ(convex_hull_indices(pts), brute_force_hull(pts)) << "trial " << trial;
  }
}

TEST(Contour, HullMatchesBruteForceOnTracedContours) {
  std::mt19937_64 rng(22);
  int tested = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Mask m = random_blob(rng, 40);
    const auto comps = connected_components(m);
    for (const auto& comp : comps.list) {
      const Mask only = (comps.labels == int(&comp - comps.list.data()) + 1).cast<std::uint8_t>() * std::uint8_t{255};
      const auto c = trace_outer_contour(only, comp.seed_x, comp.seed_y);
      if (c.size() < 3 || c.size() > 200) continue;
      EXPECT_EQ(convex_hull_indices(c), brute_force_hull(c));
      ++tested;
    }
  }
  EXPECT_GT(tested, 50);
}

TEST(Contour, EquilateralTriangleAngles) {
  const double s = 200.0;
  const std::vector<Vec2d> corners{{100, 300}, {100 + s, 300}, {100 + s / 2, 300 - s * std::sqrt(3.0) / 2}};
  std::vector<Vec2d> contour;
  const int per_edge = 50;
  for (int e = 0; e < 3; ++e)
    for (int i = 0; i < per_edge; ++i)
      contour.push_back(corners[e] + (corners[(e + 1) % 3] - corners[e]) * (double(i) / per_edge));
  const auto hull = convex_hull_indices(contour);
  const int n = static_cast<int>(contour.size()), k = 12;
  for (int i : {0, per_edge, 2 * per_edge}) {
    EXPECT_TRUE(std::binary_search(hull.begin(), hull.end(), i));
    EXPECT_NEAR(vertex_angle_degrees(contour[i], contour[(i - k + n) % n], contour[(i + k) % n]), 60.0, 0.5);
  }
}

TEST(Contour, DefectDepthOfNotch) {
  const std::vector<Vec2d> c{{0, 0}, {10, 0}, {5, 4}, {10, 10}, {0, 10}};
  const std::vector<int> hull{0, 1, 3, 4};
  const auto d = convexity_defects(c, hull);
  double deepest = 0;
  for (const auto& x : d) deepest = std::max(deepest, x.depth);
  EXPECT_NEAR(deepest, 5.0, 1e-12);
}

TEST(Contour, SingleLinkageMatchesNaive) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 200.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec2d> pts(1 + trial % 40);
    for (auto& p : pts) p = {u(rng), u(rng)};
    EXPECT_EQ(single_linkage(pts, 25.0), naive_linkage(pts, 25.0));
  }
}

TEST(Contour, PolygonCentroid) {
  const std::vector<Vec2d> sq{{0, 0}, {4, 0}, {4, 2}, {0, 2}};
  EXPECT_TRUE(polygon_centroid(sq).isApprox(Vec2d(2, 1)));
  const std::vector<Vec2d> line{{0, 0}, {2, 0}, {4, 0}};
  EXPECT_TRUE(polygon_centroid(line).isApprox(Vec2d(2, 0)));
}

TEST(Segment, SolidSquaresRecovered) {
  RgbImage img(200, 150);
  for (int y = 0; y < 150; ++y)
    for (int x = 0; x < 200; ++x) img.set(x, y, 235, 235, 235);
  struct Sq {
    int x, y, s;
    std::uint8_t r, g, b;
    const char* name;
  };
  const std::vector<Sq> squares{{10, 10, 40, 220, 20, 20, "red"},
                                {80, 30, 30, 30, 200, 40, "green"},
                                {140, 90, 50, 230, 210, 30, "yellow"},
                                {60, 100, 8, 30, 200, 40, "green"}};  // below the area floor
  for (const auto& s : squares)
    for (int y = s.y; y < s.y + s.s; ++y)
      for (int x = s.x; x < s.x + s.s; ++x) img.set(x, y, s.r, s.g, s.b);
  const auto ranges = default_hue_ranges();
  const auto objs = segment_color_objects(img, ranges);
  ASSERT_EQ(objs.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    const auto& s = squares[i];
    const BoxLabel truth{double(s.x), double(s.y), double(s.x + s.s), double(s.y + s.s)};
    bool found = false;
    for (const auto& o : objs)
      if (o.color == s.name) {
        EXPECT_GE(iou(o.bbox, truth), 0.96);
        found = true;
      }
    EXPECT_TRUE(found) << s.name;
  }
}

TEST(Fingertip, RecoversRenderedTip) {
  for (double angle : {60.0, 90.0, 120.0, 160.0}) {
    const Vec2d tip{350, 450};
    const auto f = extract_features(hand_mask(tip, angle));
    ASSERT_TRUE(f.has_value()) << angle;
    EXPECT_LT((f->fingertip() - tip).norm(), 8.0) << angle;
    const double diff = std::abs(f->alpha - angle);
    EXPECT_LT(std::min(diff, 180.0 - diff), 6.0) << angle;
  }
}

TEST(Fingertip, TranslationEquivariance) {
  const Mask m = hand_mask({300, 400}, 75.0);
  const auto a = extract_features(m);
  ASSERT_TRUE(a.has_value());
  for (auto [dx, dy] : {std::pair{17, -23}, std::pair{-40, 55}, std::pair{3, 0}}) {
    const auto b = extract_features(shift(m, dx, dy));
    ASSERT_TRUE(b.has_value());
    EXPECT_NEAR(b->alpha, a->alpha, 1e-9);
    EXPECT_NEAR(b->cx - a->cx, dx, 1e-6);
    EXPECT_NEAR(b->cy - a->cy, dy, 1e-6);
    EXPECT_NEAR(b->rho_x - a->rho_x, dx, 1e-9);
    EXPECT_NEAR(b->rho_y - a->rho_y, dy, 1e-9);
  }
}

TEST(Fingertip, EmptyMaskHasNoFeatures) {
  EXPECT_FALSE(extract_features(Mask::Zero(50, 50)).has_value());
}

TEST(Fingertip, PointingAngleOfStraightLine) {
  std::vector<Vec2d> line;
  for (int i = 0; i < 50; ++i) line.push_back({100.0 + i, 200.0 - i});
  EXPECT_NEAR(pointing_angle(line, line.back()), 45.0, 1e-6);
}
