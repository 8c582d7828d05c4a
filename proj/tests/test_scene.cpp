#include "pointgwr/scene.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace pointgwr;

using AC = AmbiguityClass;

TEST(Configs, CountsPerClassAndObjectCount) {
  EXPECT_EQ(config_count(AC::None, 1), 16u);
  EXPECT_EQ(config_count(AC::A1, 2), 6u);
  EXPECT_EQ(config_count(AC::A2, 2), 10u);
  EXPECT_EQ(config_count(AC::A3, 2), 10u);
  EXPECT_EQ(config_count(AC::A4, 2), 7u);
  EXPECT_EQ(config_count(AC::A1, 3), 4u);
  EXPECT_EQ(config_count(AC::A2, 3), 12u);
  EXPECT_EQ(config_count(AC::A3, 3), 10u);
  EXPECT_EQ(config_count(AC::A4, 3), 20u);
  EXPECT_EQ(all_configs().size(), 95u);
  EXPECT_THROW(enumerate_configs(AC::None, 2), ContractError);
  EXPECT_THROW(enumerate_configs(AC::A1, 1), ContractError);
}

TEST(Configs, PairwiseGapsHold) {
  const TableGeometry geo;
  for (const auto& s : all_configs(geo)) {
    if (s.objects.size() < 2) continue;
    std::vector<double> xs;
    for (const auto& o : s.objects) xs.push_back(o.position_cm.x());
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i)
      EXPECT_NEAR(xs[i] - xs[i - 1] - geo.cube_edge, class_gap(s.ambiguity), 1e-9);
  }
}

TEST(Configs, ObjectsStayInsideAreaAndTargetsValid) {
  const TableGeometry geo;
  for (const auto& s : all_configs(geo)) {
    ASSERT_LT(s.target_index, s.objects.size());
    for (const auto& o : s.objects) {
      EXPECT_LE(std::abs(o.position_cm.x()) + geo.cube_edge / 2, geo.half_extent() + 1e-9);
      EXPECT_TRUE(o.bbox.valid());
      EXPECT_GE(o.bbox.x1, 0.0);
      EXPECT_LE(o.bbox.x2, geo.image_width);
      EXPECT_LE(o.bbox.y2, geo.image_height);
    }
  }
}

TEST(Geometry, HomographyRoundTrip) {
  const TableGeometry geo;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> x(-20, 20), y(5, 60);
  for (int i = 0; i < 1000; ++i) {
    const Vec2d t{x(rng), y(rng)};
    const Vec2d px = geo.table_to_image(t);
    EXPECT_LT((geo.table_to_image(geo.image_to_table(px)) - px).norm(), 1e-6);
    EXPECT_LT((geo.project(t.x(), t.y(), 0.0) - px).norm(), 1e-6);
  }
}

TEST(Geometry, RowsProjectInsideImage) {
  const TableGeometry geo;
  const Vec2d r1 = geo.table_to_image({0, geo.row1_from_robot});
  const Vec2d r2 = geo.table_to_image({0, geo.row2_from_robot});
  EXPECT_NEAR(r1.x(), geo.principal_x, 1e-9);
  EXPECT_LT(r1.y(), r2.y());  // the nearer row appears lower in the image
  EXPECT_GT(r1.y(), 0.0);
  EXPECT_LT(r2.y(), geo.image_height);
}

TEST(Geometry, InvalidRejected) {
  TableGeometry geo;
  geo.cube_edge = 50;
  EXPECT_THROW(geo.validate(), ContractError);
}

TEST(Classes, NamesRoundTrip) {
  for (auto c : kAllClasses) EXPECT_EQ(ambiguity_class_from_string(to_string(c)), c);
  EXPECT_THROW(ambiguity_class_from_string("a9"), ContractError);
}

TEST(Gestures, NoiselessGestureAimsAtTarget) {
  NoiseSpec quiet{0, 0, 0};
  std::mt19937_64 rng(8);
  for (const auto& s : all_configs()) {
    const auto g = synth_gesture(s, quiet, rng);
    EXPECT_FALSE(g.noise);
    EXPECT_EQ(g.truth, s.target().bbox);
    const Vec2d to_target = s.target().bbox.centroid() - g.features.fingertip();
    const Vec2d dir = g.features.fingertip() - g.features.centroid();
    EXPECT_GT(to_target.normalized().dot(dir.normalized()), 0.9999);
    EXPECT_NEAR(g.features.alpha, inclination_degrees(dir), 1e-9);
  }
}

TEST(Gestures, OutliersMissEveryObject) {
  NoiseSpec all_noise{2, 5, 1.0};
  std::mt19937_64 rng(9);
  for (const auto& s : all_configs()) {
    const auto g = synth_gesture(s, all_noise, rng);
    EXPECT_TRUE(g.noise);
    EXPECT_EQ(g.truth, (BoxLabel{0, 0, 0, 0}));
  }
}

TEST(Dataset, DeterministicAndShaped) {
  DatasetSpec spec;
  spec.per_scene_frames = 5;
  const Dataset a = generate_dataset(spec), b = generate_dataset(spec);
  ASSERT_EQ(a.frames.size(), 95u * 5);
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.frames_of(3).size(), 5u);
  spec.seed = 43;
  EXPECT_FALSE(generate_dataset(spec).frames == a.frames);
  spec.classes = {AC::A4};
  EXPECT_EQ(generate_dataset(spec).scenes.size(), 27u);
  spec.per_scene_frames = 0;
  EXPECT_THROW(generate_dataset(spec), ContractError);
}

TEST(Render, HandMaskCoversFingertip) {
  NoiseSpec quiet{0, 0, 0};
  std::mt19937_64 rng(1);
  const auto scene = all_configs().front();
  const auto g = synth_gesture(scene, quiet, rng);
  const Mask m = render_hand_mask(g, 700, 900);
  EXPECT_EQ(m(int(g.features.rho_y), int(g.features.rho_x)), 255);
  EXPECT_EQ(m(int(g.features.cy), int(g.features.cx)), 255);
  const RgbImage img = render_scene(scene, g);
  EXPECT_EQ(img.width, 700);
  EXPECT_EQ(img.height, 900);
}
