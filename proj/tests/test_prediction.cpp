#include "pointgwr/prediction.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pointgwr;

namespace {

// Four nodes on a line in raw feature space, each labeled with its own box.
Network line_network() {
  GwrParams<double> p;
  FeatureSpace raw{false};
  std::vector<GwrNode<double>> nodes;
  for (int i = 0; i < 4; ++i) {
    Vec5d w = Vec5d::Zero();
    w[0] = i;
    nodes.push_back({i, w, BoxLabel{100.0 * i, 100, 100.0 * i + 60, 160}, 1.0});
  }
  std::vector<GwrEdge> edges{{0, 1, 0}, {1, 2, 0}, {2, 3, 0}};
  return Network::from_parts(p, raw, nodes, edges, {}, 4);
}

FeatureVector at(double a) { return {a, 0, 0, 0, 0}; }

}  // namespace

TEST(Budget, LabelCounts) {
  EXPECT_EQ(label_budget(0), 5u);
  EXPECT_EQ(label_budget(1), 6u);
  EXPECT_EQ(label_budget(100), 6u);
  EXPECT_EQ(label_budget(101), 7u);
  EXPECT_EQ(label_budget(263), 8u);
  EXPECT_EQ(label_budget(1543), 21u);
}

TEST(Predict, NoiseGateOnActivation) {
  const auto net = line_network();
  const std::vector<DetectedObject> objs{{"red", {0, 100, 60, 160}}};
  const auto far = predict(net, at(-3.0), objs);
  EXPECT_EQ(far.kind, PredictionKind::Noise);
  EXPECT_FALSE(far.area.has_value());
  EXPECT_TRUE(far.matched.empty());
  const auto near = predict(net, at(-0.1), objs);
  EXPECT_NE(near.kind, PredictionKind::Noise);
}

TEST(Predict, NoiseMonotoneInThreshold) {
  const auto net = line_network();
  const std::vector<DetectedObject> objs{{"red", {0, 100, 60, 160}}};
  for (double a = -2.0; a <= 0.0; a += 0.05) {
    bool was_noise = false;
    for (double t = 0.05; t < 1.0; t += 0.05) {
      const auto p = predict(net, at(a), objs, {t, 0.5});
      const bool noise = p.kind == PredictionKind::Noise;
      EXPECT_TRUE(!was_noise || noise);
      EXPECT_EQ(noise, p.bmu_activation < t);
      was_noise = noise;
    }
  }
}

TEST(Predict, AreaContainsBmuLabel) {
  const auto net = line_network();
  for (double a : {0.0, 0.4, 1.6, 3.0}) {
    const auto p = predict(net, at(a), {});
    ASSERT_TRUE(p.area.has_value());
    EXPECT_TRUE(p.area->contains(p.bmu_label));
    EXPECT_EQ(p.labels_used, 4u);  // budget of 6 capped by the node count
  }
}

TEST(Predict, SingleMatchResolvesAndTwoAreAmbiguous) {
  const auto net = line_network();
  const std::vector<DetectedObject> one{{"red", {100, 100, 160, 160}}};
  const auto r = predict(net, at(1.0), one);
  EXPECT_EQ(r.kind, PredictionKind::Resolved);
  ASSERT_NE(r.best(), nullptr);
  EXPECT_EQ(r.best()->color, "red");

  const std::vector<DetectedObject> two{{"red", {100, 100, 160, 160}}, {"green", {104, 100, 164, 160}}};
  const auto amb = predict(net, at(1.0), two);
  EXPECT_EQ(amb.kind, PredictionKind::Ambiguous);
  ASSERT_EQ(amb.matched.size(), 2u);
  EXPECT_EQ(amb.best()->color, "red");  // exact BMU-label overlap ranks first
}

TEST(Predict, NoCandidateStillResolves) {
  const auto net = line_network();
  const std::vector<DetectedObject> objs{{"blue", {600, 600, 660, 660}}};
  const auto p = predict(net, at(1.0), objs);
  EXPECT_EQ(p.kind, PredictionKind::Resolved);
  EXPECT_EQ(p.best(), nullptr);
}

TEST(Predict, Deterministic) {
  const auto net = line_network();
  const std::vector<DetectedObject> objs{{"red", {100, 100, 160, 160}}};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 4);
  for (int i = 0; i < 100; ++i) {
    const auto v = at(u(rng));
    const auto a = predict(net, v, objs), b = predict(net, v, objs);
    EXPECT_EQ(a.kind, b.kind);
    EXPECT_EQ(a.bmu_id, b.bmu_id);
    EXPECT_EQ(a.area, b.area);
  }
}
