#include "pointgwr/gwr.hpp"
#include "pointgwr/io.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace pointgwr;

namespace {

using Net = GwrNetwork<double>;
using Obs = Observation<double>;

Obs random_obs(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Obs o;
  for (int i = 0; i < kFeatureDim; ++i) o.x[i] = u(rng);
  const Vec2d c{100 + 500 * u(rng), 300 + 400 * u(rng)};
  o.label = BoxLabel::from_center(c, 60 + 20 * u(rng), 60 + 20 * u(rng));
  return o;
}

std::pair<int, int> brute_force_pair(const Net& net, const Vec5d& q) {
  std::vector<std::pair<double, int>> d;
  for (const auto& n : net.nodes()) d.emplace_back((n.weight - q).squaredNorm(), n.id);
  std::sort(d.begin(), d.end());
  return {d[0].second, d[1].second};
}

void check_structure(const Net& net) {
  std::set<int> touched;
  for (const auto& e : net.edges()) {
    EXPECT_LE(e.age, net.params().age_max);
    touched.insert(e.a);
    touched.insert(e.b);
  }
  for (const auto& n : net.nodes()) {
    EXPECT_TRUE(touched.count(n.id)) << "orphan node " << n.id;
    EXPECT_LE(static_cast<int>(net.neighbors(n.id).size()), net.params().nb_max);
    EXPECT_TRUE(n.label.valid());
  }
}

}  // namespace

TEST(Activity, RangeAndIdentity) {
  EXPECT_EQ(activity(0.0), 1.0);
  for (double d : {1e-9, 0.1, 1.0, 10.0, 700.0}) {
    const double a = activity(d);
    EXPECT_GT(a, 0.0);
    EXPECT_LT(a, 1.0);
  }
  EXPECT_THROW(activity(-1.0), ContractError);
}

TEST(Habituation, MonotoneAndBounded) {
  GwrParams<double> p;
  const double floor = p.h0 - p.stimulus / p.kappa_b;
  double h = p.h0;
  for (int t = 1; t <= 200; ++t) {
    const double next = habituate(h, p, FiringRole::Winner);
    if (h > floor + 1e-12) {
      EXPECT_LT(next, h);
    }
    EXPECT_GE(next, floor - 1e-12);
    EXPECT_NEAR(next, habituation_closed_form<double>(t, p.kappa_b, p.tau_b, p.h0, p.stimulus), 1e-12);
    h = next;
  }
}

TEST(Habituation, ClampedToFloor) {
  GwrParams<double> p;
  p.stimulus = 1.04;
  p.kappa_b = 1.05;
  double h = p.h0;
  for (int t = 0; t < 50; ++t) h = habituate(h, p, FiringRole::Winner);
  EXPECT_GE(h, p.h_floor);
}

TEST(Params, Validation) {
  GwrParams<double> p;
  EXPECT_NO_THROW(p.validate());
  p.eta_n = 0.2;
  EXPECT_THROW(p.validate(), ContractError);
  p = {};
  p.a_T = 1.0;
  EXPECT_THROW(p.validate(), ContractError);
  p = {};
  p.nb_max = 1;
  EXPECT_THROW(p.validate(), ContractError);
}

TEST(Network, IdenticalSeedsRejected) {
  std::mt19937_64 rng(1);
  const Obs a = random_obs(rng);
  EXPECT_THROW(Net(GwrParams<double>{}, a, a), ContractError);
}

TEST(Network, BestMatchingMatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::vector<Obs> data;
  for (int i = 0; i < 400; ++i) data.push_back(random_obs(rng));
  GwrParams<double> p;
  p.a_T = 0.97;
  Net net(p, data[0], data[1]);
  for (const auto& o : data) net.adapt(o);
  ASSERT_GT(net.node_count(), 10u);
  for (int q = 0; q < 500; ++q) {
    const Vec5d x = random_obs(rng).x;
    const auto m = net.best_matching(x);
    const auto [b1, b2] = brute_force_pair(net, x);
    EXPECT_EQ(m.bmu, b1);
    EXPECT_EQ(m.sbmu, b2);
  }
}

TEST(Network, TiesResolveToLowerId) {
  Obs a{Vec5d::Zero(), BoxLabel{0, 0, 10, 10}};
  Obs b{Vec5d::Constant(2.0), BoxLabel{0, 0, 10, 10}};
  Net net(GwrParams<double>{}, a, b);
  const auto m = net.best_matching(Vec5d::Constant(1.0));
  EXPECT_EQ(m.bmu, 0);
  EXPECT_EQ(m.sbmu, 1);
}

TEST(Network, StructuralInvariantsHoldAfterEveryStep) {
  std::mt19937_64 rng(11);
  GwrParams<double> p;
  p.a_T = 0.98;
  p.age_max = 20;
  p.nb_max = 3;
  std::vector<Obs> data;
  for (int i = 0; i < 600; ++i) data.push_back(random_obs(rng));
  Net net(p, data[0], data[1]);
  for (const auto& o : data) {
    net.adapt(o);
    check_structure(net);
  }
}

TEST(Network, WinnerMovesTowardObservation) {
  std::mt19937_64 rng(5);
  GwrParams<double> p;
  p.a_T = 0.01;  // never insert
  Obs a = random_obs(rng), b = random_obs(rng);
  Net net(p, a, b);
  for (int i = 0; i < 100; ++i) {
    const Obs o = random_obs(rng);
    const int bmu = net.best_matching(o.x).bmu;
    const double before = (net.node(bmu).weight - o.x).norm();
    net.adapt(o);
    if (net.has_node(bmu)) {
      EXPECT_LE((net.node(bmu).weight - o.x).norm(), before + 1e-12);
    }
  }
}

TEST(Network, InsertionPlacesNodeHalfway) {
  GwrParams<double> p;
  p.h_T = 0.99;
  p.h0 = 1.0;
  Obs a{Vec5d::Zero(), BoxLabel{0, 0, 10, 10}};
  Obs b{Vec5d::Constant(0.1), BoxLabel{20, 20, 30, 30}};
  Net net(p, a, b);
  // Fire node 0 once so its counter drops below h_T, then present a far sample.
  net.adapt({Vec5d::Constant(-0.001), a.label});
  Obs far{Vec5d::Constant(-1.0), BoxLabel{100, 100, 120, 120}};
  const Vec5d w0 = net.node(0).weight;
  const auto out = net.adapt(far);
  ASSERT_TRUE(out.inserted.has_value());
  EXPECT_TRUE(net.node(*out.inserted).weight.isApprox((w0 + far.x) / 2));
}

TEST(Network, DeterministicSerialization) {
  std::mt19937_64 rng(9);
  std::vector<Obs> data;
  for (int i = 0; i < 300; ++i) data.push_back(random_obs(rng));
  auto run = [&] {
    auto net = seed_network<double>({}, {}, data, 17);
    train<double>(net, data, 3, 17);
    return model_to_json(net).dump();
  };
  EXPECT_EQ(run(), run());
}

TEST(Train, LogsEveryEpochAndCallsBack) {
  std::mt19937_64 rng(2);
  std::vector<Obs> data;
  for (int i = 0; i < 50; ++i) data.push_back(random_obs(rng));
  auto net = seed_network<double>({}, {}, data, 1);
  int calls = 0;
  train<double>(net, data, 4, 1, [&](int e, const Net&) { EXPECT_EQ(e, ++calls); });
  EXPECT_EQ(calls, 4);
  ASSERT_EQ(net.train_log().size(), 4u);
  EXPECT_EQ(net.train_log().back().nodes, net.node_count());
  EXPECT_THROW(train<double>(net, std::span<const Obs>{}, 1, 1), DataError);
}

TEST(Network, FloatInstantiationTrains) {
  std::mt19937_64 rng(4);
  std::vector<Observation<float>> data;
  for (int i = 0; i < 100; ++i) {
    const Obs o = random_obs(rng);
    data.push_back({o.x.cast<float>(), Box<float>{float(o.label.x1), float(o.label.y1),
                                                  float(o.label.x2), float(o.label.y2)}});
  }
  auto net = seed_network<float>({}, {}, data, 3);
  train<float>(net, data, 2, 3);
  EXPECT_GE(net.node_count(), 2u);
}
