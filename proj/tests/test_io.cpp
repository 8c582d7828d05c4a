#include "pointgwr/config.hpp"
#include "pointgwr/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace pointgwr;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("pointgwr_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Network small_model() {
  DatasetSpec spec;
  spec.per_scene_frames = 6;
  const Dataset ds = generate_dataset(spec);
  const auto data = training_set(ds, all_scene_ids(ds), {});
  auto net = seed_network<double>({}, {}, data, 3);
  train<double>(net, data, 2, 3);
  return net;
}

}  // namespace

TEST(Model, JsonRoundTrip) {
  const auto net = small_model();
  const auto j = model_to_json(net);
  const auto back = model_from_json(j);
  EXPECT_EQ(model_to_json(back), j);
  EXPECT_EQ(back.node_count(), net.node_count());
  EXPECT_EQ(back.edges(), net.edges());
  EXPECT_EQ(back.train_log(), net.train_log());

  const fs::path p = temp_dir("model") / "m.json";
  save_model(net, p);
  EXPECT_EQ(model_to_json(load_model(p)), j);
}

TEST(Model, RejectsCorruptInput) {
  auto j = model_to_json(small_model());
  auto bad_version = j;
  bad_version["format_version"] = 99;
  EXPECT_THROW(model_from_json(bad_version), DataError);
  auto bad_edge = j;
  bad_edge["edges"].push_back({{"a", 0}, {"b", 100000}, {"age", 0}});
  EXPECT_THROW(model_from_json(bad_edge), DataError);
  EXPECT_THROW(model_from_json(nlohmann::json::object()), DataError);
  EXPECT_THROW(load_model("/nonexistent/model.json"), DataError);
}

TEST(Dataset, BinaryRoundTrip) {
  DatasetSpec spec;
  spec.per_scene_frames = 4;
  spec.noise.outlier_rate = 0.25;
  const Dataset ds = generate_dataset(spec);
  std::stringstream buf;
  write_dataset(ds, buf);
  const Dataset back = read_dataset(buf);
  EXPECT_EQ(back.frames, ds.frames);
  ASSERT_EQ(back.scenes.size(), ds.scenes.size());
  for (std::size_t i = 0; i < ds.scenes.size(); ++i) {
    EXPECT_EQ(back.scenes[i].target_index, ds.scenes[i].target_index);
    EXPECT_EQ(back.scenes[i].detected(), ds.scenes[i].detected());
  }
}

TEST(Dataset, RejectsTruncatedAndForeignFiles) {
  DatasetSpec spec;
  spec.per_scene_frames = 2;
  std::stringstream buf;
  write_dataset(generate_dataset(spec), buf);
  const std::string bytes = buf.str();
  std::stringstream cut(bytes.substr(0, bytes.size() - 7));
  EXPECT_THROW(read_dataset(cut), DataError);
  std::stringstream junk("not a dataset at all");
  EXPECT_THROW(read_dataset(junk), DataError);
}

TEST(Images, PngAndPpmRoundTrip) {
  RgbImage img(13, 7);
  std::mt19937_64 rng(1);
  for (auto& b : img.data) b = static_cast<std::uint8_t>(rng());
  const fs::path d = temp_dir("img");
  save_png(img, d / "a.png");
  save_ppm(img, d / "a.ppm");
  EXPECT_EQ(load_image(d / "a.png"), img);
  EXPECT_EQ(load_image(d / "a.ppm"), img);

  Mask m = Mask::Zero(7, 13);
  m(3, 4) = 255;
  save_png(m, d / "m.png");
  EXPECT_TRUE((load_mask(d / "m.png") == m).all());
  write_text(d / "bad.png", "garbage");
  EXPECT_THROW(load_image(d / "bad.png"), DataError);
}

TEST(SkinModelJson, RoundTrip) {
  std::vector<ChromaPixel> skin{{100, 150}, {100, 150}, {101, 151}}, non{{30, 30}, {100, 150}};
  const auto m = fit_skin_model(skin, non, 4.0);
  const auto back = skin_model_from_json(skin_model_to_json(m));
  EXPECT_EQ(back.skin_hist, m.skin_hist);
  EXPECT_EQ(back.nonskin_hist, m.nonskin_hist);
  EXPECT_EQ(back.theta, 4.0);
}

TEST(Reports, CsvHeaderAndRows) {
  OutcomeRecord r;
  r.outcome = Outcome::TruePositive;
  r.ambiguity = AmbiguityClass::A1;
  const std::vector<OutcomeRecord> recs{r};
  const auto csv = summary_csv(compute_metrics(recs));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "Class,Precision,Recall,F1,Misses,TP,FP,FN,Miss,CDA,FDN");
  EXPECT_NE(csv.find("a1,100.00,100.00,100.00,0.00,1,0,0,0"), std::string::npos);
}

TEST(Config, ParsesSectionsAndDefaults) {
  const auto c = parse_config(R"(
seed = 7
[paths]
dataset = "data/d.bin"
[gwr]
a_T = 0.9
[noise]
sigma_angle = 1.5
[dataset]
classes = ["a1", "none"]
[eval]
folds = 4
mode = "positions"
[run]
workers = 2
)",
                              "/base");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.dataset.seed, 7u);
  EXPECT_EQ(c.dataset_path, fs::path("/base/data/d.bin"));
  EXPECT_DOUBLE_EQ(c.gwr.a_T, 0.9);
  EXPECT_DOUBLE_EQ(c.dataset.noise.sigma_angle, 1.5);
  EXPECT_EQ(c.dataset.classes.size(), 2u);
  EXPECT_EQ(c.folds, 4);
  EXPECT_EQ(c.eval.mode, EvalMode::Positions);
  EXPECT_EQ(c.worker_count(), 2);
  EXPECT_EQ(c.crossval_config().params.a_T, 0.9);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("[gwr]\na_T = 0.9\n"), DataError);
  EXPECT_THROW(parse_config("seed = 1\n[gwr]\na_T = 1.5\n"), DataError);
  EXPECT_THROW(parse_config("seed = 1\n[gwr]\na_T = \"high\"\n"), DataError);
  EXPECT_THROW(parse_config("seed = 1\n[dataset]\nclasses = [\"a7\"]\n"), DataError);
  EXPECT_THROW(parse_config("seed = = 1"), DataError);
  EXPECT_THROW(parse_config("seed = 1\n[eval]\nmode = \"pixels\"\n"), DataError);
}

TEST(Config, DigestIsStable) {
  EXPECT_EQ(config_digest("seed = 1\n"), config_digest("seed = 1\n"));
  EXPECT_NE(config_digest("seed = 1\n"), config_digest("seed = 2\n"));
  EXPECT_EQ(config_digest("").size(), 16u);
}
