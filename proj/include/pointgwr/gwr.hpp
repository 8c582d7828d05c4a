#pragma once

#include "pointgwr/labels.hpp"
#include "pointgwr/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace pointgwr {

/// Growing-when-required network hyperparameters. Defaults are the fixed
/// values used throughout training; a_T is the swept insertion threshold.
template <typename Scalar>
struct GwrParams {
  Scalar eta_b{0.1};      // BMU learning rate
  Scalar eta_n{0.01};     // neighbor learning rate
  Scalar a_T{0.95};       // insertion (activity) threshold
  Scalar h_T{0.1};        // firing threshold
  Scalar tau_b{0.3};
  Scalar tau_n{0.1};
  Scalar kappa_b{1.05};   // habituation curve constants
  Scalar kappa_n{1.05};
  Scalar h0{1.0};         // initial firing value
  Scalar stimulus{1.0};   // S(t)
  int age_max{200};
  int nb_max{6};
  Scalar noise_T{0.5};    // prediction noise threshold
  Scalar h_floor{0.01};   // lower clamp of the firing counter
  bool adapt_label_size{true};

  void validate() const {
    auto in01 = [](Scalar v) { return v > 0 && v < 1; };
    if (!(in01(eta_n) && in01(eta_b) && eta_n < eta_b))
      throw ContractError("GwrParams: require 0 < eta_n < eta_b < 1");
    if (!(h_T > 0 && h_T < h0)) throw ContractError("GwrParams: require 0 < h_T < h0");
    if (!in01(a_T)) throw ContractError("GwrParams: a_T must lie in (0,1)");
    if (!in01(noise_T)) throw ContractError("GwrParams: noise_T must lie in (0,1)");
    if (!(tau_b > 0 && tau_n > 0 && kappa_b > 0 && kappa_n > 0))
      throw ContractError("GwrParams: tau and kappa must be positive");
    if (!(stimulus > 0)) throw ContractError("GwrParams: stimulus must be positive");
    if (!(h_floor > 0 && h_floor < h0)) throw ContractError("GwrParams: require 0 < h_floor < h0");
    if (age_max < 1) throw ContractError("GwrParams: age_max must be >= 1");
    if (nb_max < 2) throw ContractError("GwrParams: nb_max must be >= 2");
  }

  bool operator==(const GwrParams&) const = default;
};

template <typename Scalar>
struct Observation {
  Vec5<Scalar> x;
  Box<Scalar> label;
};

template <typename Scalar>
struct GwrNode {
  int id{0};
  Vec5<Scalar> weight{Vec5<Scalar>::Zero()};
  Box<Scalar> label;
  Scalar habituation{1};
};

struct GwrEdge {
  int a{0};
  int b{0};
  int age{0};
  bool operator==(const GwrEdge&) const = default;
};

struct EpochStats {
  int epoch{0};
  std::size_t nodes{0};
  std::size_t edges{0};
  double error{0};
  bool operator==(const EpochStats&) const = default;
};

template <typename Scalar>
struct Match {
  int bmu{-1};
  int sbmu{-1};
  Scalar distance{0};
  Scalar second_distance{0};
};

template <typename Scalar>
struct StepOutcome {
  int bmu{-1};
  int sbmu{-1};
  Scalar activity{0};
  std::optional<int> inserted;
};

enum class FiringRole { Winner, Neighbor };

/// Activity of a match: exp(-distance), in (0, 1].
template <typename Scalar>
Scalar activity(Scalar distance) {
  if (!(distance >= 0)) throw ContractError("activity: distance must be non-negative");
  return std::exp(-distance);
}

/// Rate of change of the firing counter: (kappa (h0 - h) - S) / tau.
template <typename Scalar>
Scalar habituation_rate(Scalar h, Scalar kappa, Scalar tau, Scalar h0, Scalar stimulus) {
  return (kappa * (h0 - h) - stimulus) / tau;
}

/// Firing counter after `t` consecutive firings starting from h0:
/// h0 - S/kappa (1 - exp(-kappa t / tau)).
template <typename Scalar>
Scalar habituation_closed_form(Scalar t, Scalar kappa, Scalar tau, Scalar h0, Scalar stimulus) {
  return h0 - stimulus / kappa * (Scalar(1) - std::exp(-kappa * t / tau));
}

/// One firing of a node. Integrates the habituation dynamics exactly over a
/// unit interval, so repeated firings reproduce the closed-form curve at
/// integer t, then clamps to [h_floor, h0].
template <typename Scalar>
Scalar habituate(Scalar h, const GwrParams<Scalar>& p, FiringRole role) {
  const bool winner = role == FiringRole::Winner;
  const Scalar kappa = winner ? p.kappa_b : p.kappa_n;
  const Scalar tau = winner ? p.tau_b : p.tau_n;
  const Scalar asymptote = p.h0 - p.stimulus / kappa;
  const Scalar next = asymptote + (h - asymptote) * std::exp(-kappa / tau);
  return std::clamp(next, p.h_floor, p.h0);
}

template <typename Scalar>
class GwrNetwork {
 public:
  using Vec = Vec5<Scalar>;
  using Label = Box<Scalar>;
  using Node = GwrNode<Scalar>;
  using Obs = Observation<Scalar>;

  GwrNetwork(const GwrParams<Scalar>& params, const Obs& first, const Obs& second,
             FeatureSpace space = {})
      : params_(params), space_(space) {
    params_.validate();
    if (first.x == second.x)
      throw ContractError("GwrNetwork: degenerate initialization (identical samples)");
    if (!first.label.valid() || !second.label.valid())
      throw ContractError("GwrNetwork: initial labels must be valid boxes");
    add_node(first.x, first.label);
    add_node(second.x, second.label);
  }

  /// Rebuilds a network from persisted parts; validates structure.
  static GwrNetwork from_parts(const GwrParams<Scalar>& params, FeatureSpace space,
                               const std::vector<Node>& nodes, const std::vector<GwrEdge>& edges,
                               std::vector<EpochStats> log, int next_id) {
    params.validate();
    GwrNetwork net;
    net.params_ = params;
    net.space_ = space;
    for (const Node& n : nodes) {
      if (n.id < 0 || n.id >= next_id) throw DataError("model: node id out of range");
      if (net.has_node(n.id)) throw DataError("model: duplicate node id");
      if (!n.label.valid()) throw DataError("model: invalid node label");
      net.insert_slot(n.id, n.weight, n.label, n.habituation);
    }
    net.next_id_ = next_id;
    for (const GwrEdge& e : edges) {
      if (!net.has_node(e.a) || !net.has_node(e.b) || e.a == e.b)
        throw DataError("model: edge references missing node or is a self-edge");
      if (e.age < 0 || e.age > params.age_max) throw DataError("model: edge age out of range");
      if (net.find_edge(net.slot(e.a), e.b)) throw DataError("model: duplicate edge");
      net.adj_[net.slot(e.a)].push_back({e.b, e.age});
      net.adj_[net.slot(e.b)].push_back({e.a, e.age});
    }
    if (net.node_count() < 2) throw DataError("model: network needs at least two nodes");
    net.log_ = std::move(log);
    return net;
  }

  const GwrParams<Scalar>& params() const { return params_; }
  const FeatureSpace& space() const { return space_; }
  const std::vector<EpochStats>& train_log() const { return log_; }
  int next_id() const { return next_id_; }

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& a : adj_) twice += a.size();
    return twice / 2;
  }

  bool has_node(int id) const {
    return id >= 0 && id < static_cast<int>(slot_of_.size()) && slot_of_[id] >= 0;
  }

  Node node(int id) const {
    const int s = slot(id);
    return {id, weights_[s], labels_[s], habituation_[s]};
  }

  /// All nodes ordered by id.
  std::vector<Node> nodes() const {
    std::vector<Node> out;
    out.reserve(ids_.size());
    for (int id : sorted_ids()) out.push_back(node(id));
    return out;
  }

  /// All edges with a < b, ordered lexicographically.
  std::vector<GwrEdge> edges() const {
    std::vector<GwrEdge> out;
    for (std::size_t s = 0; s < ids_.size(); ++s)
      for (const auto& [other, age] : adj_[s])
        if (ids_[s] < other) out.push_back({ids_[s], other, age});
    std::sort(out.begin(), out.end(), [](const GwrEdge& l, const GwrEdge& r) {
      return std::pair(l.a, l.b) < std::pair(r.a, r.b);
    });
    return out;
  }

  std::vector<int> neighbors(int id) const {
    std::vector<int> out;
    for (const auto& [other, age] : adj_[slot(id)]) out.push_back(other);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Nearest and second-nearest nodes by Euclidean distance; equal
  /// distances resolve to the lower id.
  Match<Scalar> best_matching(const Vec& o) const {
    if (ids_.size() < 2) throw ContractError("best_matching: network has fewer than 2 nodes");
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    Scalar d1 = inf, d2 = inf;
    int b1 = -1, b2 = -1;
    for (std::size_t s = 0; s < ids_.size(); ++s) {
      const Scalar d = squared_distance(weights_[s], o);
      const int id = ids_[s];
      if (d < d1 || (d == d1 && id < b1)) {
        d2 = d1;
        b2 = b1;
        d1 = d;
        b1 = id;
      } else if (d < d2 || (d == d2 && id < b2)) {
        d2 = d;
        b2 = id;
      }
    }
    return {b1, b2, std::sqrt(d1), std::sqrt(d2)};
  }

  /// The k nearest nodes as (id, distance), closest first, ties by id.
  std::vector<std::pair<int, Scalar>> nearest(const Vec& o, std::size_t k) const {
    std::vector<std::pair<Scalar, int>> all;
    all.reserve(ids_.size());
    for (std::size_t s = 0; s < ids_.size(); ++s)
      all.emplace_back(squared_distance(weights_[s], o), ids_[s]);
    k = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
    std::vector<std::pair<int, Scalar>> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.emplace_back(all[i].second, std::sqrt(all[i].first));
    return out;
  }

  /// One training iteration on a labeled observation.
  StepOutcome<Scalar> adapt(const Obs& o) {
    if (!o.x.allFinite()) throw ContractError("adapt: observation must be finite");
    const Match<Scalar> m = best_matching(o.x);
    StepOutcome<Scalar> out{m.bmu, m.sbmu, activity(m.distance), std::nullopt};

    connect(m.bmu, m.sbmu);

    const int b = slot(m.bmu);
    if (out.activity < params_.a_T && habituation_[b] < params_.h_T) {
      out.inserted = maybe_insert(o, m.bmu, m.sbmu);
    } else {
      update_winner_and_neighbors(o, b);
    }

    for (auto& e : adj_[slot(m.bmu)]) bump_age(m.bmu, e.other);
    prune();
    return out;
  }

  /// Adds a node halfway between the BMU and the observation, wired to
  /// both BMU and sBMU in place of their direct edge.
  std::optional<int> maybe_insert(const Obs& o, int bmu, int sbmu) {
    const int b = slot(bmu);
    const Vec w = (weights_[b] + o.x) / Scalar(2);
    const Label l = init_label(labels_[b], o.label);
    const int id = add_node(w, l);
    disconnect(bmu, sbmu);
    connect(id, bmu);
    connect(id, sbmu);
    return id;
  }

  /// Mean distance between each observation's label centroid and its BMU's
  /// label centroid, in image-normalized coordinates.
  double quantization_error(std::span<const Obs> data) const {
    if (data.empty()) return 0.0;
    double sum = 0;
    for (const Obs& o : data) {
      const int b = slot(best_matching(o.x).bmu);
      const Vec2d diff = space_.normalize_point(labels_[b].centroid().template cast<double>()) -
                         space_.normalize_point(o.label.centroid().template cast<double>());
      sum += diff.norm();
    }
    return sum / static_cast<double>(data.size());
  }

  void append_log(const EpochStats& s) { log_.push_back(s); }

 private:
  struct Link {
    int other;
    int age;
  };

  GwrNetwork() = default;

  static Scalar squared_distance(const Vec& a, const Vec& b) {
    Scalar s = 0;
    for (int i = 0; i < kFeatureDim; ++i) {
      const Scalar d = a[i] - b[i];
      s += d * d;
    }
    return s;
  }

  int slot(int id) const {
    if (!has_node(id)) throw ContractError("GwrNetwork: unknown node id");
    return slot_of_[id];
  }

  std::vector<int> sorted_ids() const {
    std::vector<int> ids = ids_;
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  int add_node(const Vec& w, const Label& l) {
    const int id = next_id_++;
    insert_slot(id, w, l, params_.h0);
    return id;
  }

  void insert_slot(int id, const Vec& w, const Label& l, Scalar h) {
    if (id >= static_cast<int>(slot_of_.size())) slot_of_.resize(id + 1, -1);
    slot_of_[id] = static_cast<int>(ids_.size());
    ids_.push_back(id);
    weights_.push_back(w);
    labels_.push_back(l);
    habituation_.push_back(h);
    adj_.emplace_back();
  }

  void remove_node(int id) {
    const int s = slot(id);
    const int last = static_cast<int>(ids_.size()) - 1;
    if (s != last) {
      ids_[s] = ids_[last];
      weights_[s] = weights_[last];
      labels_[s] = labels_[last];
      habituation_[s] = habituation_[last];
      adj_[s] = std::move(adj_[last]);
      slot_of_[ids_[s]] = s;
    }
    ids_.pop_back();
    weights_.pop_back();
    labels_.pop_back();
    habituation_.pop_back();
    adj_.pop_back();
    slot_of_[id] = -1;
  }

  Link* find_edge(int s, int other) {
    for (auto& e : adj_[s])
      if (e.other == other) return &e;
    return nullptr;
  }

  void set_age(int a, int b, int age) {
    find_edge(slot(a), b)->age = age;
    find_edge(slot(b), a)->age = age;
  }

  void bump_age(int a, int b) {
    Link* ab = find_edge(slot(a), b);
    ++ab->age;
    find_edge(slot(b), a)->age = ab->age;
  }

  void disconnect(int a, int b) {
    auto drop = [](std::vector<Link>& v, int other) {
      v.erase(std::remove_if(v.begin(), v.end(), [&](const Link& e) { return e.other == other; }),
              v.end());
    };
    drop(adj_[slot(a)], b);
    drop(adj_[slot(b)], a);
  }

  // Creates or refreshes edge {a, b} at age 0. A node pushed past nb_max
  // loses its oldest other edge (ties: lowest neighbor id).
  void connect(int a, int b) {
    if (find_edge(slot(a), b)) {
      set_age(a, b, 0);
      return;
    }
    adj_[slot(a)].push_back({b, 0});
    adj_[slot(b)].push_back({a, 0});
    enforce_degree(a, b);
    enforce_degree(b, a);
  }

  void enforce_degree(int id, int keep) {
    auto& links = adj_[slot(id)];
    while (static_cast<int>(links.size()) > params_.nb_max) {
      const Link* oldest = nullptr;
      for (const auto& e : links) {
        if (e.other == keep) continue;
        if (!oldest || e.age > oldest->age || (e.age == oldest->age && e.other < oldest->other))
          oldest = &e;
      }
      disconnect(id, oldest->other);
    }
  }

  void update_winner_and_neighbors(const Obs& o, int b) {
    const Scalar hb = habituation_[b];
    const Scalar step_b = params_.eta_b * hb;
    weights_[b] += step_b * (o.x - weights_[b]);
    adapt_label(labels_[b], o.label, step_b, params_.adapt_label_size);
    habituation_[b] = habituate(hb, params_, FiringRole::Winner);

    for (const auto& e : adj_[b]) {
      const int n = slot(e.other);
      const Scalar step_n = params_.eta_n * habituation_[n];
      weights_[n] += step_n * (o.x - weights_[n]);
      adapt_label(labels_[n], o.label, step_n, params_.adapt_label_size);
      habituation_[n] = habituate(habituation_[n], params_, FiringRole::Neighbor);
    }
  }

  // Drops edges older than age_max, then nodes left without edges.
  void prune() {
    for (std::size_t s = 0; s < adj_.size(); ++s) {
      auto& v = adj_[s];
      v.erase(std::remove_if(v.begin(), v.end(),
                             [&](const Link& e) { return e.age > params_.age_max; }),
              v.end());
    }
    for (int id : sorted_ids())
      if (adj_[slot_of_[id]].empty()) remove_node(id);
  }

  GwrParams<Scalar> params_;
  FeatureSpace space_;
  std::vector<int> ids_;
  std::vector<Vec> weights_;
  std::vector<Label> labels_;
  std::vector<Scalar> habituation_;
  std::vector<std::vector<Link>> adj_;
  std::vector<int> slot_of_;
  std::vector<EpochStats> log_;
  int next_id_{0};
};

/// Starts a network from two distinct observations drawn from `data`.
template <typename Scalar>
GwrNetwork<Scalar> seed_network(const GwrParams<Scalar>& params, FeatureSpace space,
                                std::span<const Observation<Scalar>> data, std::uint64_t seed) {
  if (data.size() < 2) throw DataError("seed_network: need at least two observations");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  const std::size_t first = pick(rng);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const std::size_t second = pick(rng);
    if (data[second].x != data[first].x) return {params, data[first], data[second], space};
  }
  for (const auto& o : data)
    if (o.x != data[first].x) return {params, data[first], o, space};
  throw DataError("seed_network: all observations are identical");
}

/// Called after each epoch with the 1-based epoch number.
template <typename Scalar>
using EpochCallback = std::function<void(int, const GwrNetwork<Scalar>&)>;

/// Runs `epochs` shuffled passes over `data`, logging node count, edge
/// count and quantization error after each pass.
template <typename Scalar>
void train(GwrNetwork<Scalar>& net, std::span<const Observation<Scalar>> data, int epochs,
           std::uint64_t seed, const EpochCallback<Scalar>& on_epoch = {}) {
  if (data.empty()) throw DataError("train: empty dataset");
  if (epochs < 1) throw ContractError("train: epochs must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const int start = net.train_log().empty() ? 0 : net.train_log().back().epoch;
  for (int e = 1; e <= epochs; ++e) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    for (std::size_t i : order) net.adapt(data[i]);
    net.append_log({start + e, net.node_count(), net.edge_count(), net.quantization_error(data)});
    if (on_epoch) on_epoch(start + e, net);
  }
}

}  // namespace pointgwr
