#include "pointgwr/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace pointgwr {

namespace {

double pct(std::size_t num, std::size_t den) { return den == 0 ? 0.0 : 100.0 * double(num) / double(den); }

template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

AggregateRow aggregate(const std::vector<const ClassReport*>& rows) {
  auto col = [&](auto member) {
    std::vector<double> v;
    for (const auto* r : rows) v.push_back(r->metrics.*member);
    return mean_std(v);
  };
  return {col(&Metrics::precision), col(&Metrics::recall), col(&Metrics::f1), col(&Metrics::miss),
          col(&Metrics::mean_iou), col(&Metrics::cda), col(&Metrics::fdn)};
}

void summarize(CrossvalResult& r) {
  std::vector<const ClassReport*> totals, nones;
  std::map<std::string, std::vector<const ClassReport*>> per_class;
  std::vector<double> nodes, qe;
  for (const auto& f : r.folds) {
    totals.push_back(&f.report.total);
    nones.push_back(&f.report.none);
    for (const auto& [name, rep] : f.report.classes) per_class[name].push_back(&rep);
    nodes.push_back(double(f.nodes));
    qe.push_back(f.quantization_error);
  }
  r.total = aggregate(totals);
  r.none = aggregate(nones);
  r.classes.clear();
  for (const auto& [name, reps] : per_class) r.classes[name] = aggregate(reps);
  r.nodes = mean_std(nodes);
  r.quantization_error = mean_std(qe);
}

std::vector<std::vector<std::uint32_t>> fold_members(const Dataset& ds, int folds, std::uint64_t seed) {
  const auto assignment = assign_folds(ds, folds, seed);
  std::vector<std::vector<std::uint32_t>> members(folds);
  for (std::uint32_t s = 0; s < assignment.size(); ++s) members[assignment[s]].push_back(s);
  return members;
}

std::vector<std::uint32_t> complement(const std::vector<std::vector<std::uint32_t>>& members, int fold) {
  std::vector<std::uint32_t> out;
  for (int f = 0; f < int(members.size()); ++f)
    if (f != fold) out.insert(out.end(), members[f].begin(), members[f].end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<const FrameRecord*> eval_frames(const Dataset& ds, std::span<const std::uint32_t> scene_ids,
                                            const EvalOptions& opt) {
  std::vector<char> wanted(ds.scenes.size(), 0);
  for (auto s : scene_ids) wanted.at(s) = 1;
  std::vector<const FrameRecord*> out;
  for (const auto& f : ds.frames) {
    if (!wanted.at(f.scene_id)) continue;
    if (opt.mode == EvalMode::Objects && opt.eval_frame >= 0 && f.frame_index != opt.eval_frame) continue;
    out.push_back(&f);
  }
  return out;
}

}  // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::TruePositive: return "tp";
    case Outcome::WrongObject: return "wrong_object";
    case Outcome::Miss: return "miss";
    case Outcome::CorrectRejection: return "correct_rejection";
    case Outcome::FalseAlarm: return "false_alarm";
  }
  return "?";
}

GroundTruth ground_truth(const FrameRecord& f, const Scene& scene) {
  GroundTruth g;
  if (!f.noise) g.target = f.truth;
  g.ambiguity = scene.ambiguity;
  g.n_objects = scene.objects.size();
  return g;
}

OutcomeRecord classify_outcome(const Prediction& p, std::span<const DetectedObject> objects,
                               const GroundTruth& truth) {
  OutcomeRecord r;
  r.ambiguity = truth.ambiguity;
  r.real_target = truth.target.has_value();
  r.multi_object = truth.n_objects > 1;
  r.noise_predicted = p.kind == PredictionKind::Noise;
  r.ambiguity_flagged = p.kind == PredictionKind::Ambiguous;

  const ObjectMatch* best = r.noise_predicted ? nullptr : p.best();
  if (best && best->index >= objects.size()) throw ContractError("classify_outcome: object index out of range");
  if (!r.real_target) {
    r.outcome = best ? Outcome::FalseAlarm : Outcome::CorrectRejection;
    return r;
  }
  if (!best) {
    r.outcome = Outcome::Miss;
    return r;
  }
  r.iou = iou(objects[best->index].bbox, *truth.target);
  r.outcome = r.iou >= kHitIou ? Outcome::TruePositive : Outcome::WrongObject;
  return r;
}

OutcomeRecord classify_position(const Prediction& p, const GroundTruth& truth) {
  OutcomeRecord r;
  r.ambiguity = truth.ambiguity;
  r.real_target = truth.target.has_value();
  r.multi_object = truth.n_objects > 1;
  r.noise_predicted = p.kind == PredictionKind::Noise;
  r.ambiguity_flagged = p.kind == PredictionKind::Ambiguous;
  if (!r.real_target) {
    r.outcome = r.noise_predicted ? Outcome::CorrectRejection : Outcome::FalseAlarm;
    return r;
  }
  if (r.noise_predicted) {
    r.outcome = Outcome::Miss;
    return r;
  }
  r.iou = iou(p.bmu_label, *truth.target);
  r.outcome = r.iou >= kHitIou ? Outcome::TruePositive : Outcome::WrongObject;
  return r;
}

OutcomeRecord classify_baseline(const std::optional<TargetHit>& hit,
                                std::span<const DetectedObject> objects, const GroundTruth& truth) {
  OutcomeRecord r;
  r.ambiguity = truth.ambiguity;
  r.real_target = truth.target.has_value();
  r.multi_object = truth.n_objects > 1;
  if (hit && hit->index >= objects.size()) throw ContractError("classify_baseline: object index out of range");
  if (!r.real_target) {
    r.outcome = hit ? Outcome::FalseAlarm : Outcome::CorrectRejection;
    return r;
  }
  if (!hit) {
    r.outcome = Outcome::Miss;
    return r;
  }
  r.iou = iou(objects[hit->index].bbox, *truth.target);
  r.outcome = r.iou >= kHitIou ? Outcome::TruePositive : Outcome::WrongObject;
  return r;
}

void Counts::add(const OutcomeRecord& r) {
  ++frames;
  if (r.real_target) {
    ++real;
    iou_sum += r.iou;
    if (r.noise_predicted) ++fdn;
  }
  if (r.multi_object) {
    ++multi_object;
    if (r.ambiguity_flagged) ++cda;
  }
  switch (r.outcome) {
    case Outcome::TruePositive: ++tp; break;
    case Outcome::WrongObject: ++fp; ++fn; break;
    case Outcome::Miss: ++fn; ++miss; break;
    case Outcome::CorrectRejection: ++correct_rejections; break;
    case Outcome::FalseAlarm: ++fp; ++false_alarms; break;
  }
}

Counts& Counts::operator+=(const Counts& o) {
  frames += o.frames;
  real += o.real;
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  miss += o.miss;
  correct_rejections += o.correct_rejections;
  false_alarms += o.false_alarms;
  cda += o.cda;
  multi_object += o.multi_object;
  fdn += o.fdn;
  iou_sum += o.iou_sum;
  return *this;
}

Metrics metrics_from(const Counts& c) {
  Metrics m;
  m.precision = pct(c.tp, c.tp + c.fp);
  m.recall = pct(c.tp, c.tp + c.fn);
  m.f1 = (m.precision + m.recall) > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.miss = pct(c.miss, c.real);
  m.mean_iou = c.real == 0 ? 0.0 : c.iou_sum / double(c.real);
  m.cda = pct(c.cda, c.multi_object);
  m.fdn = pct(c.fdn, c.real);
  return m;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

EvalReport compute_metrics(std::span<const OutcomeRecord> outcomes) {
  if (outcomes.empty()) throw ContractError("compute_metrics: no outcomes");
  EvalReport rep;
  for (const auto& o : outcomes) {
    const std::string name = to_string(o.ambiguity);
    rep.classes[name].counts.add(o);
    if (o.ambiguity == AmbiguityClass::None)
      rep.none.counts.add(o);
    else
      rep.total.counts.add(o);
  }
  for (auto& [name, c] : rep.classes) c.metrics = metrics_from(c.counts);
  rep.total.metrics = metrics_from(rep.total.counts);
  rep.none.metrics = metrics_from(rep.none.counts);
  return rep;
}

std::vector<OutcomeRecord> evaluate_gwr(const Network& net, const Dataset& ds,
                                        std::span<const std::uint32_t> scene_ids, const EvalOptions& opt) {
  std::vector<OutcomeRecord> out;
  std::vector<std::vector<DetectedObject>> objects(ds.scenes.size());
  for (const auto* f : eval_frames(ds, scene_ids, opt)) {
    const auto& scene = ds.scenes.at(f->scene_id);
    auto& objs = objects[f->scene_id];
    if (objs.empty()) objs = scene.detected();
    const auto p = predict(net, f->features, objs, opt.predict);
    const auto truth = ground_truth(*f, scene);
    out.push_back(opt.mode == EvalMode::Objects ? classify_outcome(p, objs, truth) : classify_position(p, truth));
  }
  return out;
}

std::vector<OutcomeRecord> evaluate_baseline(const Dataset& ds, std::span<const std::uint32_t> scene_ids,
                                             const EvalOptions& opt, double min_phi) {
  std::vector<OutcomeRecord> out;
  for (const auto* f : eval_frames(ds, scene_ids, opt)) {
    const auto& scene = ds.scenes.at(f->scene_id);
    const auto objs = scene.detected();
    std::optional<TargetHit> hit;
    if (f->finger.tip != (f->finger.flank_a + f->finger.flank_b) / 2)
      hit = select_target(pointing_ray(f->finger), objs, min_phi);
    out.push_back(classify_baseline(hit, objs, ground_truth(*f, scene)));
  }
  return out;
}

std::vector<Observation<double>> training_set(const Dataset& ds, std::span<const std::uint32_t> scene_ids,
                                              const FeatureSpace& space) {
  std::vector<char> wanted(ds.scenes.size(), 0);
  for (auto s : scene_ids) wanted.at(s) = 1;
  std::vector<Observation<double>> out;
  for (const auto& f : ds.frames)
    if (wanted.at(f.scene_id) && !f.noise) out.push_back({space.map(f.features), f.truth});
  return out;
}

std::vector<std::uint32_t> all_scene_ids(const Dataset& ds) {
  std::vector<std::uint32_t> ids(ds.scenes.size());
  std::iota(ids.begin(), ids.end(), 0u);
  return ids;
}

std::vector<int> assign_folds(const Dataset& ds, int folds, std::uint64_t seed) {
  if (folds < 2) throw ContractError("assign_folds: need at least two folds");
  if (ds.scenes.size() < std::size_t(folds)) throw ContractError("assign_folds: fewer scenes than folds");
  std::mt19937_64 rng(seed);
  std::vector<int> fold(ds.scenes.size(), 0);
  int dealt = 0;
  for (auto c : kAllClasses) {
    std::vector<std::uint32_t> ids;
    for (std::uint32_t s = 0; s < ds.scenes.size(); ++s)
      if (ds.scenes[s].ambiguity == c) ids.push_back(s);
    for (std::size_t i = ids.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(ids[i - 1], ids[pick(rng)]);
    }
    // Continue the deal across classes so small classes do not all start at fold 0.
    for (auto s : ids) fold[s] = dealt++ % folds;
  }
  return fold;
}

MeanStd mean_std(std::span<const double> v) {
  if (v.empty()) return {};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / double(v.size()))};
}

std::uint64_t fold_seed(std::uint64_t seed, int fold) {
  return seed * 0x9E3779B97F4A7C15ull + std::uint64_t(fold + 1) * 0xBF58476D1CE4E5B9ull;
}

std::vector<CrossvalResult> sweep(const Dataset& ds, const SweepConfig& cfg) {
  if (cfg.a_T.empty() || cfg.epochs.empty()) throw ContractError("sweep: grids must be non-empty");
  for (int e : cfg.epochs)
    if (e < 1) throw ContractError("sweep: epoch counts must be positive");
  const auto& base = cfg.base;
  if (ds.scenes.size() < 3) throw ContractError("crossval: need at least three scenes");
  const auto members = fold_members(ds, base.folds, base.seed);
  const int max_epochs = *std::max_element(cfg.epochs.begin(), cfg.epochs.end());

  const std::size_t n_a = cfg.a_T.size(), n_e = cfg.epochs.size(), n_f = std::size_t(base.folds);
  std::vector<CrossvalResult> cells(n_a * n_e);
  for (std::size_t i = 0; i < n_a; ++i)
    for (std::size_t j = 0; j < n_e; ++j) {
      cells[i * n_e + j].a_T = cfg.a_T[i];
      cells[i * n_e + j].epochs = cfg.epochs[j];
      cells[i * n_e + j].folds.resize(n_f);
    }

  parallel_for(n_a * n_f, base.workers, [&](std::size_t task) {
    const std::size_t ai = task / n_f;
    const int fold = int(task % n_f);
    auto params = base.params;
    params.a_T = cfg.a_T[ai];
    const auto train_ids = complement(members, fold);
    const auto data = training_set(ds, train_ids, base.space);
    if (data.size() < 2) throw DataError("crossval: training fold has too few frames");
    const auto seed = fold_seed(base.seed, fold);
    auto net = seed_network<double>(params, base.space, data, seed);
    train<double>(net, data, max_epochs, seed, [&](int epoch, const Network& snapshot) {
      for (std::size_t ej = 0; ej < n_e; ++ej) {
        if (cfg.epochs[ej] != epoch) continue;
        EvalOptions eval = base.eval;
        eval.predict.noise_T = params.noise_T;
        FoldResult fr;
        fr.fold = fold;
        fr.nodes = snapshot.node_count();
        fr.edges = snapshot.edge_count();
        fr.quantization_error = snapshot.train_log().back().error;
        fr.report = compute_metrics(evaluate_gwr(snapshot, ds, members[fold], eval));
        cells[ai * n_e + ej].folds[fold] = std::move(fr);
      }
    });
  });

  for (auto& c : cells) summarize(c);
  return cells;
}

CrossvalResult crossval(const Dataset& ds, const CrossvalConfig& cfg) {
  SweepConfig sc{cfg, {cfg.params.a_T}, {cfg.epochs}};
  return sweep(ds, sc).front();
}

CrossvalResult crossval_baseline(const Dataset& ds, const CrossvalConfig& cfg) {
  if (ds.scenes.size() < 3) throw ContractError("crossval: need at least three scenes");
  const auto members = fold_members(ds, cfg.folds, cfg.seed);
  CrossvalResult r;
  for (int f = 0; f < cfg.folds; ++f) {
    FoldResult fr;
    fr.fold = f;
    fr.report = compute_metrics(evaluate_baseline(ds, members[f], cfg.eval));
    r.folds.push_back(std::move(fr));
  }
  summarize(r);
  return r;
}

}  // namespace pointgwr
