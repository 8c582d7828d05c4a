#include "pointgwr/config.hpp"
#include "pointgwr/eval.hpp"
#include "pointgwr/io.hpp"
#include "pointgwr/scene.hpp"
#include "pointgwr/vision.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace pointgwr;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool json_output{false};
};

struct Loaded {
  RunConfig cfg;
  std::string digest;
};

Loaded load(const Common& c) {
  Loaded l;
  if (!c.config.empty()) {
    if (!fs::exists(c.config)) throw UsageError("config file not found: " + c.config);
    const std::string text = read_text(c.config);
    l.cfg = parse_config(text, fs::path(c.config).parent_path());
    l.digest = config_digest(text);
  }
  if (c.seed) {
    l.cfg.seed = *c.seed;
    l.cfg.dataset.seed = *c.seed;
  }
  if (c.workers) l.cfg.workers = *c.workers;
  if (c.json_output) l.cfg.json_output = true;
  return l;
}

fs::path report_dir(const RunConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("POINTGWR_REPORT_DIR"); env && *env) return env;
  return cfg.report_dir;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "TOML run configuration");
  sub->add_option("--seed", c.seed, "Override the configured seed");
  sub->add_option("--workers", c.workers, "Worker threads (0 = available parallelism)");
  sub->add_flag("--json", c.json_output, "Machine-readable output on stdout");
}

void print_table(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::string cell;
    std::istringstream row(line);
    bool first = true;
    while (std::getline(row, cell, ',')) {
      std::cout << (first ? "" : "  ");
      std::cout.width(first ? 8 : 10);
      std::cout << cell;
      first = false;
    }
    std::cout << '\n';
  }
}

FeatureVector parse_features(const std::string& text) {
  std::vector<double> v;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw UsageError("--features expects five comma-separated numbers");
    }
  }
  if (v.size() != kFeatureDim) throw UsageError("--features expects five comma-separated numbers");
  return {v[0], v[1], v[2], v[3], v[4]};
}

std::vector<DetectedObject> parse_objects(const json& j) {
  std::vector<DetectedObject> out;
  try {
    for (const auto& o : j) {
      const auto& j_box = o.at("bbox");
      BoxLabel box;
      if (j_box.is_object()) {
        box = {j_box.at("x1").get<double>(), j_box.at("y1").get<double>(), j_box.at("x2").get<double>(),
               j_box.at("y2").get<double>()};
      } else {
        const auto b = j_box.get<std::vector<double>>();
        if (b.size() != 4) throw DataError("objects: bbox must have four entries");
        box = {b[0], b[1], b[2], b[3]};
      }
      out.push_back({o.value("color", std::string{}), box});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("objects: ") + e.what());
  }
  return out;
}

SkinModel skin_from_calibration(const std::vector<std::string>& pairs, double theta) {
  std::vector<ChromaPixel> skin, nonskin;
  for (const auto& pair : pairs) {
    const auto colon = pair.rfind(':');
    if (colon == std::string::npos) throw UsageError("--calib expects image:mask");
    const auto img = load_image(pair.substr(0, colon));
    const auto mask = load_mask(pair.substr(colon + 1));
    if (mask.rows() != img.height || mask.cols() != img.width)
      throw DataError("calibration mask size differs from image: " + pair);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        const auto* p = img.at(x, y);
        const auto c = rgb_to_ycbcr(p[0], p[1], p[2]);
        (mask(y, x) ? skin : nonskin).push_back({c.cb, c.cr});
      }
  }
  return fit_skin_model(skin, nonskin, theta);
}

int cmd_simulate(const Common& c, const std::string& out, const std::string& render_dir) {
  auto l = load(c);
  const auto ds = generate_dataset(l.cfg.dataset);
  const fs::path path = out.empty() ? l.cfg.dataset_path : fs::path(out);
  save_dataset(ds, path);
  if (!render_dir.empty()) {
    fs::create_directories(render_dir);
    const int frame = std::min(l.cfg.eval.eval_frame < 0 ? 0 : l.cfg.eval.eval_frame, l.cfg.dataset.per_scene_frames - 1);
    for (std::uint32_t s = 0; s < ds.scenes.size(); ++s) {
      for (const auto* f : ds.frames_of(s)) {
        if (f->frame_index != frame) continue;
        GestureSample g{f->features, f->finger, f->truth, f->noise};
        const auto img = render_scene(ds.scenes[s], g, l.cfg.dataset.geometry, l.cfg.dataset.gesture);
        char name[32];
        std::snprintf(name, sizeof name, "scene_%03u", s);
        save_png(img, fs::path(render_dir) / (std::string(name) + ".png"));
        save_png(render_hand_mask(g, img.width, img.height, l.cfg.dataset.gesture),
                 fs::path(render_dir) / (std::string(name) + "_skin.png"));
      }
    }
  }
  if (l.cfg.json_output)
    std::cout << json{{"dataset", path.string()}, {"scenes", ds.scenes.size()}, {"frames", ds.frames.size()}}.dump()
              << '\n';
  else
    std::cout << "wrote " << ds.scenes.size() << " scenes, " << ds.frames.size() << " frames to " << path.string()
              << '\n';
  return 0;
}

int cmd_train(const Common& c, const std::string& dataset, std::optional<double> a_T, std::optional<int> epochs,
              const std::string& out) {
  auto l = load(c);
  if (a_T) l.cfg.gwr.a_T = *a_T;
  if (epochs) l.cfg.epochs = *epochs;
  l.cfg.gwr.validate();
  if (l.cfg.epochs < 1) throw UsageError("--epochs must be >= 1");
  const auto ds = load_dataset(dataset.empty() ? l.cfg.dataset_path : fs::path(dataset));
  const auto data = training_set(ds, all_scene_ids(ds), l.cfg.space);
  auto net = seed_network<double>(l.cfg.gwr, l.cfg.space, data, l.cfg.seed);
  train<double>(net, data, l.cfg.epochs, l.cfg.seed);
  const fs::path path = out.empty() ? l.cfg.model_path : fs::path(out);
  save_model(net, path);
  const auto& last = net.train_log().back();
  if (l.cfg.json_output)
    std::cout << json{{"model", path.string()}, {"nodes", last.nodes}, {"edges", last.edges}, {"error", last.error}}
                     .dump()
              << '\n';
  else
    std::cout << "trained " << last.epoch << " epochs: " << last.nodes << " nodes, " << last.edges
              << " edges, quantization error " << last.error << "; wrote " << path.string() << '\n';
  return 0;
}

int cmd_predict(const Common& c, const std::string& model, const std::string& features, const std::string& objects,
                const std::string& dataset, std::optional<std::size_t> record, const std::string& image,
                const std::string& skin_model) {
  auto l = load(c);
  const auto net = load_model(model.empty() ? l.cfg.model_path : fs::path(model));
  FeatureVector v;
  std::vector<DetectedObject> objs;
  if (!image.empty()) {
    if (skin_model.empty()) throw UsageError("--image requires --skin-model");
    const auto img = load_image(image);
    const auto skin = skin_model_from_json(json::parse(read_text(skin_model)));
    const auto f = extract_features(classify_skin(skin, img), l.cfg.fingertip);
    if (!f) throw DataError("no pointing hand found in " + image);
    v = *f;
    objs = segment_color_objects(img, l.cfg.hue_ranges);
  } else if (record) {
    const auto ds = load_dataset(dataset.empty() ? l.cfg.dataset_path : fs::path(dataset));
    if (*record >= ds.frames.size()) throw UsageError("--record out of range");
    const auto& f = ds.frames[*record];
    v = f.features;
    objs = ds.scenes[f.scene_id].detected();
  } else if (!features.empty()) {
    v = parse_features(features);
  } else {
    throw UsageError("predict needs --features, --record or --image");
  }
  if (!objects.empty()) {
    try {
      objs = parse_objects(json::parse(read_text(objects)));
    } catch (const json::parse_error& e) {
      throw DataError(std::string("objects: ") + e.what());
    }
  }
  PredictOptions opt = l.cfg.eval.predict;
  opt.noise_T = net.params().noise_T;
  auto out = to_json(predict(net, v, objs, opt));
  out["features"] = to_json(v);
  std::cout << out.dump(l.cfg.json_output ? -1 : 2) << '\n';
  return 0;
}

void write_report(const fs::path& dir, const std::string& stem, const json& body, const std::string& csv) {
  fs::create_directories(dir);
  write_text(dir / (stem + ".json"), body.dump(2) + "\n");
  write_text(dir / "summary.csv", csv);
}

int cmd_evaluate(const Common& c, const std::string& model, const std::string& dataset, const std::string& out,
                 const std::string& method, bool crossval_flag, const std::string& mode, std::optional<int> epochs,
                 std::optional<double> a_T) {
  auto l = load(c);
  if (a_T) l.cfg.gwr.a_T = *a_T;
  if (epochs) l.cfg.epochs = *epochs;
  if (mode == "positions") l.cfg.eval.mode = EvalMode::Positions;
  else if (mode == "objects") l.cfg.eval.mode = EvalMode::Objects;
  else if (!mode.empty()) throw UsageError("--mode must be objects or positions");
  const auto ds = load_dataset(dataset.empty() ? l.cfg.dataset_path : fs::path(dataset));
  const fs::path dir = report_dir(l.cfg, out);
  const bool baseline = method == "baseline";

  json body{{"method", baseline ? "baseline" : "gwr"},
            {"mode", l.cfg.eval.mode == EvalMode::Objects ? "objects" : "positions"},
            {"eval_frame", l.cfg.eval.eval_frame},
            {"config_digest", l.digest}};
  std::string csv;
  if (crossval_flag) {
    const auto cv = baseline ? crossval_baseline(ds, l.cfg.crossval_config()) : crossval(ds, l.cfg.crossval_config());
    body["crossval"] = to_json(cv);
    csv = summary_csv(cv);
  } else {
    const auto ids = all_scene_ids(ds);
    EvalReport rep;
    if (baseline) {
      rep = compute_metrics(evaluate_baseline(ds, ids, l.cfg.eval));
    } else {
      const auto net = load_model(model.empty() ? l.cfg.model_path : fs::path(model));
      EvalOptions eval = l.cfg.eval;
      eval.predict.noise_T = net.params().noise_T;
      rep = compute_metrics(evaluate_gwr(net, ds, ids, eval));
    }
    body["report"] = to_json(rep);
    csv = summary_csv(rep);
  }
  write_report(dir, "report", body, csv);
  if (l.cfg.json_output)
    std::cout << body.dump() << '\n';
  else
    print_table(csv);
  return 0;
}

int cmd_sweep(const Common& c, const std::string& dataset, const std::string& out) {
  auto l = load(c);
  const auto ds = load_dataset(dataset.empty() ? l.cfg.dataset_path : fs::path(dataset));
  SweepConfig sc{l.cfg.crossval_config(), l.cfg.sweep_a_T, l.cfg.sweep_epochs};
  const auto cells = sweep(ds, sc);
  const fs::path dir = report_dir(l.cfg, out);
  fs::create_directories(dir);
  json summary = json::array();
  for (const auto& cell : cells) {
    char name[64];
    std::snprintf(name, sizeof name, "cell_aT%.2f_e%d", cell.a_T, cell.epochs);
    json body{{"config_digest", l.digest}, {"crossval", to_json(cell)}};
    write_text(dir / (std::string(name) + ".json"), body.dump(2) + "\n");
    write_text(dir / (std::string(name) + ".csv"), summary_csv(cell));
    summary.push_back({{"a_T", cell.a_T},
                       {"epochs", cell.epochs},
                       {"nodes", cell.nodes.mean},
                       {"quantization_error", cell.quantization_error.mean},
                       {"precision", round2(cell.total.precision.mean)},
                       {"recall", round2(cell.total.recall.mean)},
                       {"f1", round2(cell.total.f1.mean)},
                       {"miss_pct", round2(cell.total.miss.mean)}});
  }
  const std::string csv = sweep_csv(cells);
  write_text(dir / "summary.csv", csv);
  write_text(dir / "summary.json", json{{"config_digest", l.digest}, {"cells", summary}}.dump(2) + "\n");
  if (l.cfg.json_output)
    std::cout << summary.dump() << '\n';
  else
    print_table(csv);
  return 0;
}

int cmd_segment(const Common& c, const std::string& image, const std::string& skin_model,
                const std::vector<std::string>& calib, const std::string& out) {
  auto l = load(c);
  const auto img = load_image(image);
  const fs::path dir = report_dir(l.cfg, out);
  fs::create_directories(dir);

  std::optional<SkinModel> skin;
  if (!calib.empty()) {
    skin = skin_from_calibration(calib, l.cfg.skin_theta);
    write_text(dir / "skin_model.json", skin_model_to_json(*skin).dump() + "\n");
  } else if (!skin_model.empty()) {
    try {
      skin = skin_model_from_json(json::parse(read_text(skin_model)));
    } catch (const json::parse_error& e) {
      throw DataError(std::string("skin model: ") + e.what());
    }
  }

  json result{{"image", image}};
  json objects = json::array();
  for (const auto& o : segment_color_objects(img, l.cfg.hue_ranges)) objects.push_back(to_json(o));
  result["objects"] = objects;
  for (const auto& r : l.cfg.hue_ranges) save_png(color_mask(img, r), dir / ("mask_" + r.name + ".png"));

  result["hand"] = nullptr;
  if (skin) {
    const auto mask = classify_skin(*skin, img);
    save_png(mask, dir / "mask_skin.png");
    if (const auto g = detect_fingertip(mask, l.cfg.fingertip)) {
      const auto f = features_from_geometry(*g, l.cfg.fingertip);
      result["hand"] = {{"features", to_json(f)},
                        {"delta", g->delta},
                        {"flank_a", {g->flank_a.x(), g->flank_a.y()}},
                        {"flank_b", {g->flank_b.x(), g->flank_b.y()}},
                        {"contour_points", g->contour.size()},
                        {"hull_points", g->hull.size()},
                        {"defects", g->defects.size()}};
    }
  }
  write_text(dir / "objects.json", result.dump(2) + "\n");
  std::cout << result.dump(l.cfg.json_output ? -1 : 2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pointing-gesture target resolution with growing-when-required networks"};
  app.require_subcommand(1);

  Common common;
  std::string out, dataset, model, render_dir;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  add_common(sim, common);
  sim->add_option("--out", out, "Dataset file");
  sim->add_option("--render", render_dir, "Also render one image per scene into this directory");

  std::optional<double> a_T;
  std::optional<int> epochs;
  auto* tr = app.add_subcommand("train", "Train a network on a dataset");
  add_common(tr, common);
  tr->add_option("--dataset", dataset, "Dataset file");
  tr->add_option("--aT", a_T, "Insertion threshold");
  tr->add_option("--epochs", epochs, "Training epochs");
  tr->add_option("--out", out, "Model file");

  std::string features, objects, image, skin_model;
  std::optional<std::size_t> record;
  auto* pr = app.add_subcommand("predict", "Resolve one gesture against a model");
  add_common(pr, common);
  pr->add_option("--model", model, "Model file");
  pr->add_option("--features", features, "alpha,cx,cy,rho_x,rho_y");
  pr->add_option("--objects", objects, "JSON list of {color, bbox}");
  pr->add_option("--dataset", dataset, "Dataset file for --record");
  pr->add_option("--record", record, "Frame index in the dataset");
  pr->add_option("--image", image, "PNG or PPM image");
  pr->add_option("--skin-model", skin_model, "Skin model JSON (with --image)");

  std::string method = "gwr", mode;
  bool cv = false;
  auto* ev = app.add_subcommand("evaluate", "Evaluate a model or the pointing-ray baseline");
  add_common(ev, common);
  ev->add_option("--model", model, "Model file");
  ev->add_option("--dataset", dataset, "Dataset file");
  ev->add_option("--out", out, "Report directory");
  ev->add_option("--method", method, "gwr or baseline")->check(CLI::IsMember({"gwr", "baseline"}));
  ev->add_flag("--crossval", cv, "Scene-disjoint cross-validation instead of a saved model");
  ev->add_option("--mode", mode, "objects or positions");
  ev->add_option("--epochs", epochs, "Training epochs for --crossval");
  ev->add_option("--aT", a_T, "Insertion threshold for --crossval");

  auto* sw = app.add_subcommand("sweep", "Cross-validated a_T x epochs grid");
  add_common(sw, common);
  sw->add_option("--dataset", dataset, "Dataset file");
  sw->add_option("--out", out, "Report directory");

  std::vector<std::string> calib;
  auto* sg = app.add_subcommand("segment", "Run the vision pipeline on one image");
  add_common(sg, common);
  sg->add_option("--image", image, "PNG or PPM image")->required();
  sg->add_option("--skin-model", skin_model, "Skin model JSON");
  sg->add_option("--calib", calib, "Calibration pairs image:mask (builds a skin model)");
  sg->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sim) return cmd_simulate(common, out, render_dir);
    if (*tr) return cmd_train(common, dataset, a_T, epochs, out);
    if (*pr) return cmd_predict(common, model, features, objects, dataset, record, image, skin_model);
    if (*ev) return cmd_evaluate(common, model, dataset, out, method, cv, mode, epochs, a_T);
    if (*sw) return cmd_sweep(common, dataset, out);
    if (*sg) return cmd_segment(common, image, skin_model, calib, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
