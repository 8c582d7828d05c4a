#include "pointgwr/io.hpp"

#include <png.h>

#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace pointgwr {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little, "dataset IO assumes a little-endian host");

constexpr char kMagic[6] = {'P', 'G', 'W', 'R', 'D', 'S'};
constexpr std::uint32_t kMaxRecord = 1u << 20;

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    bytes_.append(buf, sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes_ += s;
  }
  void put_box(const BoxLabel& b) {
    for (double v : {b.x1, b.y1, b.x2, b.y2}) put(v);
  }
  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw DataError("dataset: truncated record");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    if (pos_ + n > bytes_.size()) throw DataError("dataset: truncated string");
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  BoxLabel get_box() {
    BoxLabel b;
    b.x1 = get<double>();
    b.y1 = get<double>();
    b.x2 = get<double>();
    b.y2 = get<double>();
    return b;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string bytes_;
  std::size_t pos_{0};
};

template <typename T>
T read_raw(std::istream& in) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw DataError("dataset: unexpected end of file");
  return v;
}

std::string read_record(std::istream& in) {
  const auto n = read_raw<std::uint32_t>(in);
  if (n > kMaxRecord) throw DataError("dataset: record length out of range");
  std::string bytes(n, '\0');
  if (!in.read(bytes.data(), n)) throw DataError("dataset: unexpected end of file");
  return bytes;
}

void write_record(std::ostream& out, const Writer& w) {
  const auto n = static_cast<std::uint32_t>(w.bytes().size());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(w.bytes().data(), n);
}

AmbiguityClass class_from_byte(std::uint8_t b) {
  if (b > 4) throw DataError("dataset: unknown class tag");
  return static_cast<AmbiguityClass>(b);
}

json params_to_json(const GwrParams<double>& p) {
  return {{"eta_b", p.eta_b},     {"eta_n", p.eta_n},       {"a_T", p.a_T},
          {"h_T", p.h_T},         {"tau_b", p.tau_b},       {"tau_n", p.tau_n},
          {"kappa_b", p.kappa_b}, {"kappa_n", p.kappa_n},   {"h0", p.h0},
          {"stimulus", p.stimulus}, {"age_max", p.age_max}, {"nb_max", p.nb_max},
          {"noise_T", p.noise_T}, {"h_floor", p.h_floor},   {"adapt_label_size", p.adapt_label_size}};
}

GwrParams<double> params_from_json(const json& j) {
  GwrParams<double> p;
  p.eta_b = j.at("eta_b").get<double>();
  p.eta_n = j.at("eta_n").get<double>();
  p.a_T = j.at("a_T").get<double>();
  p.h_T = j.at("h_T").get<double>();
  p.tau_b = j.at("tau_b").get<double>();
  p.tau_n = j.at("tau_n").get<double>();
  p.kappa_b = j.at("kappa_b").get<double>();
  p.kappa_n = j.at("kappa_n").get<double>();
  p.h0 = j.at("h0").get<double>();
  p.stimulus = j.at("stimulus").get<double>();
  p.age_max = j.at("age_max").get<int>();
  p.nb_max = j.at("nb_max").get<int>();
  p.noise_T = j.at("noise_T").get<double>();
  p.h_floor = j.at("h_floor").get<double>();
  p.adapt_label_size = j.at("adapt_label_size").get<bool>();
  return p;
}

BoxLabel box_from_json(const json& j) {
  if (!j.is_object()) throw DataError("model: label must be an object with x1, y1, x2, y2");
  return {j.at("x1").get<double>(), j.at("y1").get<double>(), j.at("x2").get<double>(), j.at("y2").get<double>()};
}

json metrics_json(const ClassReport& c) {
  const auto& k = c.counts;
  const auto& m = c.metrics;
  return {{"tp", k.tp},
          {"fp", k.fp},
          {"fn", k.fn},
          {"miss", k.miss},
          {"frames", k.frames},
          {"real_targets", k.real},
          {"correct_rejections", k.correct_rejections},
          {"false_alarms", k.false_alarms},
          {"cda_count", k.cda},
          {"fdn_count", k.fdn},
          {"precision", round2(m.precision)},
          {"recall", round2(m.recall)},
          {"f1", round2(m.f1)},
          {"miss_pct", round2(m.miss)},
          {"mean_iou", round2(m.mean_iou * 100) / 100},
          {"cda_pct", round2(m.cda)},
          {"fdn_pct", round2(m.fdn)}};
}

json mean_std_json(const MeanStd& s) { return {{"mean", round2(s.mean)}, {"std", round2(s.std)}}; }

json row_json(const AggregateRow& r) {
  return {{"precision", mean_std_json(r.precision)}, {"recall", mean_std_json(r.recall)},
          {"f1", mean_std_json(r.f1)},               {"miss_pct", mean_std_json(r.miss)},
          {"cda_pct", mean_std_json(r.cda)},         {"fdn_pct", mean_std_json(r.fdn)}};
}

std::string fmt2(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << round2(v);
  return s.str();
}

struct PngFile {
  std::FILE* f{nullptr};
  ~PngFile() {
    if (f) std::fclose(f);
  }
};

bool has_png_signature(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char sig[8]{};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in && png_sig_cmp(sig, 0, 8) == 0;
}

RgbImage load_png(const std::filesystem::path& path) {
  PngFile file{std::fopen(path.string().c_str(), "rb")};
  if (!file.f) throw DataError("cannot open image " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("libpng initialization failed");
  }
  RgbImage img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("corrupt PNG " + path.string());
  }
  png_init_io(png, file.f);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  const auto w = png_get_image_width(png, info), h = png_get_image_height(png, info);
  if (png_get_rowbytes(png, info) != w * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("unsupported PNG layout " + path.string());
  }
  img = RgbImage(int(w), int(h));
  std::vector<png_bytep> ptrs(h);
  for (png_uint_32 y = 0; y < h; ++y) ptrs[y] = img.data.data() + std::size_t(y) * w * 3;
  png_read_image(png, ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::filesystem::path& path, int w, int h, int color_type, int channels,
               const std::uint8_t* data) {
  PngFile file{std::fopen(path.string().c_str(), "wb")};
  if (!file.f) throw DataError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw DataError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("failed writing PNG " + path.string());
  }
  png_init_io(png, file.f);
  png_set_IHDR(png, info, w, h, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < h; ++y)
    png_write_row(png, const_cast<png_bytep>(data + std::size_t(y) * w * channels));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RgbImage load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image " + path.string());
  auto token = [&] {
    std::string t;
    while (in) {
      const int c = in.get();
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
      } else if (std::isspace(c)) {
        if (!t.empty()) return t;
      } else if (c != EOF) {
        t += char(c);
      }
    }
    return t;
  };
  if (token() != "P6") throw DataError("unsupported image format " + path.string());
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw DataError("malformed PPM header " + path.string());
  }
  if (w <= 0 || h <= 0 || maxval != 255) throw DataError("unsupported PPM " + path.string());
  RgbImage img(w, h);
  if (!in.read(reinterpret_cast<char*>(img.data.data()), std::streamsize(img.data.size())))
    throw DataError("truncated PPM " + path.string());
  return img;
}

}  // namespace

json model_to_json(const Network& net) {
  json nodes = json::array();
  for (const auto& n : net.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"weight", std::vector<double>(n.weight.data(), n.weight.data() + kFeatureDim)},
                     {"label", to_json(n.label)},
                     {"habituation", n.habituation}});
  }
  json edges = json::array();
  for (const auto& e : net.edges()) edges.push_back({{"a", e.a}, {"b", e.b}, {"age", e.age}});
  json log = json::array();
  for (const auto& s : net.train_log())
    log.push_back({{"epoch", s.epoch}, {"nodes", s.nodes}, {"edges", s.edges}, {"error", s.error}});
  const auto& sp = net.space();
  return {{"format_version", kModelFormatVersion},
          {"params", params_to_json(net.params())},
          {"feature_space",
           {{"normalize", sp.normalize}, {"image_width", sp.image_width}, {"image_height", sp.image_height}}},
          {"nodes", nodes},
          {"edges", edges},
          {"train_log", log},
          {"next_id", net.next_id()}};
}

Network model_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("format_version")) throw DataError("model: missing format_version");
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw DataError("model: unsupported format_version " + std::to_string(version));
    const auto params = params_from_json(j.at("params"));
    FeatureSpace sp;
    const auto& fs = j.at("feature_space");
    sp.normalize = fs.at("normalize").get<bool>();
    sp.image_width = fs.at("image_width").get<double>();
    sp.image_height = fs.at("image_height").get<double>();
    std::vector<GwrNode<double>> nodes;
    for (const auto& n : j.at("nodes")) {
      GwrNode<double> node;
      node.id = n.at("id").get<int>();
      const auto w = n.at("weight").get<std::vector<double>>();
      if (w.size() != kFeatureDim) throw DataError("model: weight must have 5 entries");
      for (int k = 0; k < kFeatureDim; ++k) node.weight[k] = w[k];
      node.label = box_from_json(n.at("label"));
      node.habituation = n.at("habituation").get<double>();
      nodes.push_back(node);
    }
    std::vector<GwrEdge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_object()) throw DataError("model: edge must be an object with a, b, age");
      edges.push_back({e.at("a").get<int>(), e.at("b").get<int>(), e.at("age").get<int>()});
    }
    std::vector<EpochStats> log;
    for (const auto& s : j.at("train_log"))
      log.push_back({s.at("epoch").get<int>(), s.at("nodes").get<std::size_t>(), s.at("edges").get<std::size_t>(),
                     s.at("error").get<double>()});
    return Network::from_parts(params, sp, nodes, edges, std::move(log), j.at("next_id").get<int>());
  } catch (const json::exception& e) {
    throw DataError(std::string("model: ") + e.what());
  } catch (const ContractError& e) {
    throw DataError(std::string("model: ") + e.what());
  }
}

void save_model(const Network& net, const std::filesystem::path& path) {
  write_text(path, model_to_json(net).dump(1) + "\n");
}

Network load_model(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw DataError("model: " + std::string(e.what()));
  }
  return model_from_json(j);
}

void write_dataset(const Dataset& ds, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  const std::uint8_t header[2] = {kDatasetVersion, 0};
  out.write(reinterpret_cast<const char*>(header), 2);
  Writer h;
  h.put<std::uint32_t>(std::uint32_t(ds.image_width));
  h.put<std::uint32_t>(std::uint32_t(ds.image_height));
  h.put<std::uint32_t>(std::uint32_t(ds.scenes.size()));
  h.put<std::uint32_t>(std::uint32_t(ds.frames.size()));
  out.write(h.bytes().data(), std::streamsize(h.bytes().size()));

  for (const auto& s : ds.scenes) {
    Writer w;
    w.put<std::uint8_t>(static_cast<std::uint8_t>(s.ambiguity));
    w.put<std::uint32_t>(std::uint32_t(s.target_index));
    w.put<std::uint32_t>(std::uint32_t(s.objects.size()));
    for (const auto& o : s.objects) {
      w.put_string(o.color);
      w.put(o.position_cm.x());
      w.put(o.position_cm.y());
      w.put<std::uint8_t>(std::uint8_t(o.row));
      w.put_box(o.bbox);
    }
    write_record(out, w);
  }
  for (const auto& f : ds.frames) {
    Writer w;
    for (double v : {f.features.alpha, f.features.cx, f.features.cy, f.features.rho_x, f.features.rho_y}) w.put(v);
    w.put_box(f.truth);
    w.put<std::uint32_t>(f.scene_id);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(f.ambiguity));
    w.put<std::uint8_t>(f.noise ? 1 : 0);
    w.put<std::uint16_t>(f.frame_index);
    for (double v : {f.finger.flank_a.x(), f.finger.flank_a.y(), f.finger.flank_b.x(), f.finger.flank_b.y()})
      w.put(v);
    write_record(out, w);
  }
  if (!out) throw DataError("dataset: write failed");
}

Dataset read_dataset(std::istream& in) {
  char magic[6];
  if (!in.read(magic, 6) || std::memcmp(magic, kMagic, 6) != 0) throw DataError("dataset: bad magic");
  const auto version = read_raw<std::uint8_t>(in);
  read_raw<std::uint8_t>(in);
  if (version != kDatasetVersion) throw DataError("dataset: unsupported version " + std::to_string(version));
  Dataset ds;
  ds.image_width = int(read_raw<std::uint32_t>(in));
  ds.image_height = int(read_raw<std::uint32_t>(in));
  const auto n_scenes = read_raw<std::uint32_t>(in);
  const auto n_frames = read_raw<std::uint32_t>(in);

  for (std::uint32_t i = 0; i < n_scenes; ++i) {
    Reader r(read_record(in));
    Scene s;
    s.ambiguity = class_from_byte(r.get<std::uint8_t>());
    s.target_index = r.get<std::uint32_t>();
    const auto n_obj = r.get<std::uint32_t>();
    if (n_obj == 0 || n_obj > 16) throw DataError("dataset: scene object count out of range");
    for (std::uint32_t k = 0; k < n_obj; ++k) {
      SceneObject o;
      o.color = r.get_string();
      const double x = r.get<double>();
      o.position_cm = {x, r.get<double>()};
      o.row = r.get<std::uint8_t>();
      o.bbox = r.get_box();
      s.objects.push_back(std::move(o));
    }
    if (s.target_index >= s.objects.size()) throw DataError("dataset: target index out of range");
    if (!r.done()) throw DataError("dataset: trailing bytes in scene record");
    ds.scenes.push_back(std::move(s));
  }
  ds.frames.reserve(n_frames);
  for (std::uint32_t i = 0; i < n_frames; ++i) {
    Reader r(read_record(in));
    FrameRecord f;
    f.features.alpha = r.get<double>();
    f.features.cx = r.get<double>();
    f.features.cy = r.get<double>();
    f.features.rho_x = r.get<double>();
    f.features.rho_y = r.get<double>();
    f.truth = r.get_box();
    f.scene_id = r.get<std::uint32_t>();
    f.ambiguity = class_from_byte(r.get<std::uint8_t>());
    f.noise = r.get<std::uint8_t>() != 0;
    f.frame_index = r.get<std::uint16_t>();
    const double ax = r.get<double>(), ay = r.get<double>(), bx = r.get<double>(), by = r.get<double>();
    f.finger = {{ax, ay}, {bx, by}, f.features.fingertip()};
    if (!r.done()) throw DataError("dataset: trailing bytes in frame record");
    if (f.scene_id >= ds.scenes.size()) throw DataError("dataset: frame references unknown scene");
    ds.frames.push_back(f);
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_dataset(ds, out);
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path.string());
  return read_dataset(in);
}

RgbImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("image not found: " + path.string());
  return has_png_signature(path) ? load_png(path) : load_ppm(path);
}

void save_png(const RgbImage& img, const std::filesystem::path& path) {
  write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 3, img.data.data());
}

void save_png(const Mask& mask, const std::filesystem::path& path) {
  write_png(path, int(mask.cols()), int(mask.rows()), PNG_COLOR_TYPE_GRAY, 1, mask.data());
}

void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), std::streamsize(img.data.size()));
}

Mask load_mask(const std::filesystem::path& path) {
  const auto img = load_image(path);
  Mask m = Mask::Zero(img.height, img.width);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const auto* p = img.at(x, y);
      if (p[0] || p[1] || p[2]) m(y, x) = 255;
    }
  return m;
}

json to_json(const BoxLabel& b) { return {{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2}}; }

json to_json(const Prediction& p) {
  json matched = json::array();
  for (const auto& m : p.matched)
    matched.push_back({{"index", m.index}, {"color", m.color}, {"iou_area", m.iou_area}, {"iou_bmu", m.iou_bmu}});
  json j{{"kind", to_string(p.kind)},
         {"bmu_activation", p.bmu_activation},
         {"bmu_id", p.bmu_id},
         {"bmu_label", to_json(p.bmu_label)},
         {"labels_used", p.labels_used},
         {"matched", matched}};
  j["area"] = p.area ? to_json(*p.area) : json(nullptr);
  return j;
}

json to_json(const EvalReport& r) {
  json classes = json::object();
  for (const auto& [name, c] : r.classes) classes[name] = metrics_json(c);
  return {{"classes", classes}, {"total", metrics_json(r.total)}, {"none", metrics_json(r.none)}};
}

json to_json(const CrossvalResult& r) {
  json folds = json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"fold", f.fold},
                     {"nodes", f.nodes},
                     {"edges", f.edges},
                     {"quantization_error", f.quantization_error},
                     {"report", to_json(f.report)}});
  json classes = json::object();
  for (const auto& [name, row] : r.classes) classes[name] = row_json(row);
  return {{"a_T", r.a_T},
          {"epochs", r.epochs},
          {"std_convention", "population"},
          {"nodes", {{"mean", r.nodes.mean}, {"std", r.nodes.std}}},
          {"quantization_error", {{"mean", r.quantization_error.mean}, {"std", r.quantization_error.std}}},
          {"classes", classes},
          {"total", row_json(r.total)},
          {"none", row_json(r.none)},
          {"folds", folds}};
}

json to_json(const DetectedObject& o) { return {{"color", o.color}, {"bbox", to_json(o.bbox)}}; }

json to_json(const FeatureVector& v) {
  return {{"alpha", v.alpha}, {"cx", v.cx}, {"cy", v.cy}, {"rho_x", v.rho_x}, {"rho_y", v.rho_y}};
}

std::string summary_csv(const EvalReport& r) {
  std::ostringstream s;
  s << "Class,Precision,Recall,F1,Misses,TP,FP,FN,Miss,CDA,FDN\n";
  auto row = [&](const std::string& name, const ClassReport& c) {
    const auto& m = c.metrics;
    const auto& k = c.counts;
    s << name << ',' << fmt2(m.precision) << ',' << fmt2(m.recall) << ',' << fmt2(m.f1) << ',' << fmt2(m.miss)
      << ',' << k.tp << ',' << k.fp << ',' << k.fn << ',' << k.miss << ',' << fmt2(m.cda) << ',' << fmt2(m.fdn)
      << '\n';
  };
  for (const auto& [name, c] : r.classes)
    if (name != "none") row(name, c);
  row("total", r.total);
  if (r.none.counts.frames > 0) row("none", r.none);
  return s.str();
}

std::string summary_csv(const CrossvalResult& r) {
  std::ostringstream s;
  s << "Class,Precision,Precision_std,Recall,Recall_std,F1,F1_std,Misses,Misses_std,CDA,CDA_std,FDN,FDN_std\n";
  auto row = [&](const std::string& name, const AggregateRow& a) {
    s << name;
    for (const auto* m : {&a.precision, &a.recall, &a.f1, &a.miss, &a.cda, &a.fdn})
      s << ',' << fmt2(m->mean) << ',' << fmt2(m->std);
    s << '\n';
  };
  for (const auto& [name, a] : r.classes)
    if (name != "none") row(name, a);
  row("total", r.total);
  if (r.classes.contains("none")) row("none", r.none);
  return s.str();
}

std::string sweep_csv(std::span<const CrossvalResult> cells) {
  std::ostringstream s;
  s << "a_T,epochs,nodes,nodes_std,quantization_error,quantization_error_std,Precision,Recall,F1,Misses\n";
  for (const auto& c : cells) {
    s << fmt2(c.a_T) << ',' << c.epochs << ',' << fmt2(c.nodes.mean) << ',' << fmt2(c.nodes.std) << ','
      << std::setprecision(6) << std::fixed << c.quantization_error.mean << ',' << c.quantization_error.std << ','
      << fmt2(c.total.precision.mean) << ',' << fmt2(c.total.recall.mean) << ',' << fmt2(c.total.f1.mean) << ','
      << fmt2(c.total.miss.mean) << '\n';
  }
  return s.str();
}

json skin_model_to_json(const SkinModel& m) {
  auto sparse = [](const std::vector<std::uint64_t>& hist) {
    json out = json::array();
    for (std::size_t i = 0; i < hist.size(); ++i)
      if (hist[i]) out.push_back({i / 256, i % 256, hist[i]});
    return out;
  };
  return {{"theta", m.theta}, {"skin", sparse(m.skin_hist)}, {"nonskin", sparse(m.nonskin_hist)}};
}

SkinModel skin_model_from_json(const json& j) {
  try {
    SkinModel m;
    m.theta = j.at("theta").get<double>();
    auto fill = [](const json& arr, std::vector<std::uint64_t>& hist, std::uint64_t& total) {
      for (const auto& e : arr) {
        const auto cb = e.at(0).get<int>(), cr = e.at(1).get<int>();
        if (cb < 0 || cb > 255 || cr < 0 || cr > 255) throw DataError("skin model: chroma out of range");
        const auto n = e.at(2).get<std::uint64_t>();
        hist[SkinModel::bin(std::uint8_t(cb), std::uint8_t(cr))] += n;
        total += n;
      }
    };
    fill(j.at("skin"), m.skin_hist, m.total_skin);
    fill(j.at("nonskin"), m.nonskin_hist, m.total_nonskin);
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("skin model: ") + e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace pointgwr
