#include "pointgwr/eval.hpp"
#include "pointgwr/labels.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pointgwr;

TEST(Labels, InitLabelAveragesCentersAndSizes) {
  const BoxLabel a{0, 0, 10, 20};
  const BoxLabel b{100, 100, 130, 140};
  const BoxLabel l = init_label(a, b);
  EXPECT_DOUBLE_EQ(l.centroid().x(), (5.0 + 115.0) / 2);
  EXPECT_DOUBLE_EQ(l.centroid().y(), (10.0 + 120.0) / 2);
  EXPECT_DOUBLE_EQ(l.width(), 20.0);
  EXPECT_DOUBLE_EQ(l.height(), 30.0);
}

TEST(Labels, AdaptIsContraction) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    BoxLabel l = BoxLabel::from_center({700 * u(rng), 900 * u(rng)}, 5 + 100 * u(rng), 5 + 100 * u(rng));
    const BoxLabel t = BoxLabel::from_center({700 * u(rng), 900 * u(rng)}, 5 + 100 * u(rng), 5 + 100 * u(rng));
    const double step = i % 10 == 0 ? 1.0 : u(rng);
    const double before = (l.centroid() - t.centroid()).norm();
    adapt_label(l, t, step, i % 2 == 0);
    EXPECT_LE((l.centroid() - t.centroid()).norm(), before + 1e-9);
    EXPECT_TRUE(l.valid());
  }
}

TEST(Labels, FixedSizeKeepsExtent) {
  BoxLabel l{0, 0, 40, 60};
  adapt_label(l, BoxLabel{100, 100, 110, 110}, 0.5, false);
  EXPECT_DOUBLE_EQ(l.width(), 40.0);
  EXPECT_DOUBLE_EQ(l.height(), 60.0);
}

TEST(Labels, BatchUpdateChecksSizes) {
  BoxLabel bmu{0, 0, 10, 10}, n1{20, 20, 30, 30};
  std::vector<BoxLabel*> ns{&n1};
  std::vector<double> hs{0.5, 0.5};
  EXPECT_THROW(adapt_labels<double>(bmu, ns, BoxLabel{5, 5, 15, 15}, 0.1, 0.01, 1.0, hs), ContractError);
  hs.pop_back();
  adapt_labels<double>(bmu, ns, BoxLabel{5, 5, 15, 15}, 0.1, 0.01, 1.0, hs);
  EXPECT_NEAR(bmu.centroid().x(), 5.5, 1e-12);
  EXPECT_NEAR(n1.centroid().x(), 25.0 - 0.005 * 15, 1e-12);
}

// Connected nodes should carry nearby labels after training on scenario data.
TEST(Labels, TopologyPreservesLabelLocality) {
  DatasetSpec spec;
  spec.per_scene_frames = 20;
  const Dataset ds = generate_dataset(spec);
  const auto ids = all_scene_ids(ds);
  const auto data = training_set(ds, ids, FeatureSpace{});
  auto net = seed_network<double>({}, {}, data, 5);
  train<double>(net, data, 10, 5);

  const auto nodes = net.nodes();
  double connected = 0;
  int nc = 0;
  for (const auto& e : net.edges()) {
    connected += (net.node(e.a).label.centroid() - net.node(e.b).label.centroid()).norm();
    ++nc;
  }
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  double random = 0;
  int nr = 0;
  while (nr < 500) {
    const auto& a = nodes[pick(rng)];
    const auto& b = nodes[pick(rng)];
    const auto nb = net.neighbors(a.id);
    if (a.id == b.id || std::find(nb.begin(), nb.end(), b.id) != nb.end()) continue;
    random += (a.label.centroid() - b.label.centroid()).norm();
    ++nr;
  }
  ASSERT_GT(nc, 0);
  EXPECT_LT(connected / nc, random / nr);
}
