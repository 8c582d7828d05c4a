#include "pointgwr/scene.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <map>

namespace pointgwr {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

const char* const kPalette[] = {"red", "green", "yellow"};

struct RgbColor {
  std::uint8_t r, g, b;
};

RgbColor color_of(const std::string& name) {
  static const std::map<std::string, RgbColor> table{{"red", {220, 30, 30}},
                                                     {"green", {40, 180, 60}},
                                                     {"yellow", {230, 210, 40}},
                                                     {"blue", {40, 70, 210}}};
  const auto it = table.find(name);
  return it == table.end() ? RgbColor{128, 128, 128} : it->second;
}

enum class Pattern { Row1, Row2, V, Lambda, FrontBack, BackFront };

std::vector<int> rows_for(Pattern p, int n) {
  std::vector<int> rows(n);
  for (int j = 0; j < n; ++j) {
    switch (p) {
      case Pattern::Row1: rows[j] = 1; break;
      case Pattern::Row2: rows[j] = 2; break;
      case Pattern::V: rows[j] = (j == n / 2 && n == 3) ? 2 : 1; break;
      case Pattern::Lambda: rows[j] = (j == n / 2 && n == 3) ? 1 : 2; break;
      case Pattern::BackFront: rows[j] = j % 2 == 0 ? 1 : 2; break;
      case Pattern::FrontBack: rows[j] = j % 2 == 0 ? 2 : 1; break;
    }
  }
  return rows;
}

struct Layout {
  Pattern pattern;
  int offsets;
};

std::vector<Layout> layouts(AmbiguityClass c, int n) {
  using P = Pattern;
  switch (c) {
    case AmbiguityClass::None:
      return {};
    case AmbiguityClass::A1:
      if (n == 2) return {{P::Row1, 3}, {P::Row2, 3}};
      if (n == 3) return {{P::Row1, 1}, {P::Row2, 1}, {P::V, 1}, {P::Lambda, 1}};
      break;
    case AmbiguityClass::A2:
      if (n == 2) return {{P::Row1, 5}, {P::Row2, 5}};
      if (n == 3) return {{P::Row1, 3}, {P::Row2, 3}, {P::V, 3}, {P::Lambda, 3}};
      break;
    case AmbiguityClass::A3:
      if (n == 2 || n == 3) return {{P::Row1, 5}, {P::Row2, 5}};
      break;
    case AmbiguityClass::A4:
      if (n == 2) return {{P::BackFront, 4}, {P::FrontBack, 3}};
      if (n == 3) return {{P::V, 10}, {P::Lambda, 10}};
      break;
  }
  return {};
}

// Shrinks a box hidden behind a nearer one that spans its full width or height.
void occlude(BoxLabel& back, const BoxLabel& front) {
  if (intersection_area(back, front) <= 0) return;
  if (front.y1 <= back.y1 && front.y2 >= back.y2) {
    if (front.x1 <= back.x1)
      back.x1 = std::max(back.x1, front.x2);
    else
      back.x2 = std::min(back.x2, front.x1);
  } else if (front.x1 <= back.x1 && front.x2 >= back.x2) {
    if (front.y1 <= back.y1)
      back.y1 = std::max(back.y1, front.y2);
    else
      back.y2 = std::min(back.y2, front.y1);
  }
}

Vec2d gaussian2(double sigma, Rng& rng) {
  if (sigma <= 0) return Vec2d::Zero();
  std::normal_distribution<double> n(0.0, sigma);
  const double x = n(rng);
  return {x, n(rng)};
}

double gaussian(double mean, double sigma, Rng& rng) {
  if (sigma <= 0) return mean;
  return std::normal_distribution<double>(mean, sigma)(rng);
}

Vec2d rotate(const Vec2d& v, double deg) {
  const double c = std::cos(deg * kDegToRad), s = std::sin(deg * kDegToRad);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

FingerPoints finger_points(const Vec2d& tip, const Vec2d& dir, const GestureModel& gm) {
  const Vec2d base = tip - gm.finger_length * dir;
  const Vec2d perp(-dir.y(), dir.x());
  return {base + perp * (gm.finger_width / 2), base - perp * (gm.finger_width / 2), tip};
}

bool ray_hits_any(const FingerPoints& f, const Scene& scene) {
  const auto ray = pointing_ray(f);
  for (const auto& o : scene.objects)
    if (chord_hit(ray, o.bbox)) return true;
  return false;
}

// Lateral positions shared by every layout's target cube.
std::vector<double> slot_positions(const TableGeometry& geo) {
  const double lim = geo.half_extent() - geo.cube_edge / 2 - 0.3;
  std::vector<double> out;
  for (int i = 0; i < 8; ++i) out.push_back(-lim + i * (2 * lim / 7));
  return out;
}

}  // namespace

Mat3d TableGeometry::homography() const {
  const double phi = camera_pitch_deg * kDegToRad;
  const double c = std::cos(phi), s = std::sin(phi), h = camera_height;
  const double f = focal_px, px = principal_x, py = principal_y;
  Mat3d H;
  H << f, px * c, px * h * s,
      0, -f * s + py * c, f * h * c + py * h * s,
      0, c, h * s;
  return H;
}

Vec2d TableGeometry::table_to_image(const Vec2d& t) const {
  const Eigen::Vector3d p = homography() * Eigen::Vector3d(t.x(), t.y(), 1.0);
  return p.head<2>() / p.z();
}

Vec2d TableGeometry::image_to_table(const Vec2d& px) const {
  const Eigen::Vector3d p = homography().inverse() * Eigen::Vector3d(px.x(), px.y(), 1.0);
  return p.head<2>() / p.z();
}

Vec2d TableGeometry::project(double x, double y, double z) const {
  const double phi = camera_pitch_deg * kDegToRad;
  const double c = std::cos(phi), s = std::sin(phi);
  const double dz = z - camera_height;
  const double depth = y * c - dz * s;
  const double down = -y * s - dz * c;
  if (!(depth > 0)) throw ContractError("project: point behind the camera");
  return {principal_x + focal_px * x / depth, principal_y + focal_px * down / depth};
}

BoxLabel TableGeometry::cube_box(const Vec2d& center) const {
  const double e = cube_edge / 2;
  BoxLabel b{1e300, 1e300, -1e300, -1e300};
  for (double dx : {-e, e})
    for (double dy : {-e, e})
      for (double z : {0.0, cube_edge}) {
        const Vec2d p = project(center.x() + dx, center.y() + dy, z);
        b.x1 = std::min(b.x1, p.x());
        b.y1 = std::min(b.y1, p.y());
        b.x2 = std::max(b.x2, p.x());
        b.y2 = std::max(b.y2, p.y());
      }
  return b;
}

void TableGeometry::validate() const {
  if (!(area > 0 && cube_edge > 0 && cube_edge < area))
    throw ContractError("table geometry: area and cube edge must be positive");
  for (double row : {row1_from_robot, row2_from_robot})
    if (row - cube_edge / 2 < 0) throw ContractError("table geometry: row outside the area");
  if (!(focal_px > 0 && camera_height > 0 && image_width > 0 && image_height > 0))
    throw ContractError("table geometry: camera parameters must be positive");
  if (std::abs(homography().determinant()) < 1e-9)
    throw ContractError("table geometry: homography is singular");
}

const char* to_string(AmbiguityClass c) {
  switch (c) {
    case AmbiguityClass::None: return "none";
    case AmbiguityClass::A1: return "a1";
    case AmbiguityClass::A2: return "a2";
    case AmbiguityClass::A3: return "a3";
    case AmbiguityClass::A4: return "a4";
  }
  return "?";
}

AmbiguityClass ambiguity_class_from_string(const std::string& s) {
  for (auto c : kAllClasses)
    if (s == to_string(c)) return c;
  throw ContractError("unknown ambiguity class '" + s + "'");
}

double class_gap(AmbiguityClass c) {
  switch (c) {
    case AmbiguityClass::A1: return 10.0;
    case AmbiguityClass::A2: return 5.0;
    case AmbiguityClass::A3: return 0.0;
    case AmbiguityClass::A4: return -2.0;
    case AmbiguityClass::None: break;
  }
  return 0.0;
}

std::vector<DetectedObject> Scene::detected() const {
  std::vector<DetectedObject> out;
  for (const auto& o : objects) out.push_back({o.color, o.bbox});
  return out;
}

std::size_t config_count(AmbiguityClass c, int n) {
  if (c == AmbiguityClass::None) return n == 1 ? 16 : 0;
  std::size_t total = 0;
  for (const auto& l : layouts(c, n)) total += l.offsets;
  return total;
}

std::vector<Scene> enumerate_configs(AmbiguityClass c, int n, const TableGeometry& geo) {
  if (config_count(c, n) == 0)
    throw ContractError(std::string("enumerate_configs: class ") + to_string(c) + " has no layouts with " +
                        std::to_string(n) + " objects");
  std::vector<Scene> out;
  auto place = [&](Scene& s, const Vec2d& pos, int row) {
    s.objects.push_back({"", pos, row, geo.cube_box(pos)});
  };
  auto row_y = [&](int row) { return row == 1 ? geo.row1_from_robot : geo.row2_from_robot; };

  if (c == AmbiguityClass::None) {
    for (int row : {1, 2})
      for (double x : slot_positions(geo)) {
        Scene s;
        place(s, {x, row_y(row)}, row);
        out.push_back(std::move(s));
      }
  } else {
    const double spacing = geo.cube_edge + class_gap(c);
    const double span = (n - 1) * spacing;
    const double lmax = geo.half_extent() - geo.cube_edge / 2 - span / 2;
    const auto slots = slot_positions(geo);
    int layout_index = 0;
    for (const auto& l : layouts(c, n)) {
      const auto rows = rows_for(l.pattern, n);
      // Group centers that put some object exactly on a slot, one per center.
      std::vector<std::pair<double, int>> feasible;
      for (int j = 0; j < n; ++j) {
        const double rel = (j - (n - 1) / 2.0) * spacing;
        for (double x : slots) {
          const double center = x - rel;
          if (std::abs(center) > lmax + 1e-9) continue;
          const bool seen = std::any_of(feasible.begin(), feasible.end(),
                                        [&](const auto& f) { return std::abs(f.first - center) < 1e-9; });
          if (!seen) feasible.push_back({center, j});
        }
      }
      std::sort(feasible.begin(), feasible.end());
      if (feasible.size() < std::size_t(l.offsets))
        throw ContractError("enumerate_configs: not enough slot-aligned layouts");
      for (int k = 0; k < l.offsets; ++k) {
        const std::size_t pick =
            l.offsets == 1 ? std::size_t(layout_index) % feasible.size()
                           : std::size_t(std::lround(k * double(feasible.size() - 1) / (l.offsets - 1)));
        const auto [center, target] = feasible[pick];
        Scene s;
        s.ambiguity = c;
        s.target_index = std::size_t(target);
        for (int j = 0; j < n; ++j) place(s, {center + (j - (n - 1) / 2.0) * spacing, row_y(rows[j])}, rows[j]);
        out.push_back(std::move(s));
      }
      ++layout_index;
    }
  }

  for (std::size_t t = 0; t < out.size(); ++t) {
    auto& objs = out[t].objects;
    for (std::size_t j = 0; j < objs.size(); ++j) objs[j].color = kPalette[(t + j) % 3];
    for (auto& back : objs)
      for (const auto& front : objs)
        if (back.row == 1 && front.row == 2) occlude(back.bbox, front.bbox);
  }
  return out;
}

std::vector<Scene> all_configs(const TableGeometry& geo) {
  std::vector<Scene> out;
  for (auto c : kAllClasses)
    for (int n = 1; n <= 3; ++n)
      if (config_count(c, n) > 0)
        for (auto& s : enumerate_configs(c, n, geo)) out.push_back(std::move(s));
  return out;
}

void NoiseSpec::validate() const {
  if (!(sigma_angle >= 0 && sigma_pos >= 0)) throw ContractError("noise: sigmas must be non-negative");
  if (!(outlier_rate >= 0 && outlier_rate <= 1)) throw ContractError("noise: outlier_rate must lie in [0, 1]");
}

GesturePose sample_pose(const Scene& scene, const GestureModel& gm, bool outlier,
                        const TableGeometry& geo, Rng& rng) {
  GesturePose p;
  p.hand_length = gaussian(gm.hand_length_mean, gm.hand_length_sd, rng);
  if (!outlier) {
    p.anchor = gm.anchor + gaussian2(gm.anchor_jitter, rng);
    const Vec2d to_target = scene.target().bbox.centroid() - p.anchor;
    p.direction = to_target.normalized();
    p.reach = std::max(0.0, to_target.norm() - gaussian(gm.standoff_mean, gm.standoff_sd, rng));
    return p;
  }

  // Hand resting low at one image side, pointing outward off the table.
  p.outlier = true;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const bool left = unit(rng) < 0.5;
    const double tilt = -30.0 + 60.0 * unit(rng);
    const Vec2d out_dir = rotate(Vec2d(left ? -1.0 : 1.0, 0.0), tilt);
    const double x = left ? 90 + 70 * unit(rng) : geo.image_width - 160 + 70 * unit(rng);
    const double y = 830 + 60 * unit(rng);
    p.anchor = {x, y};
    p.direction = out_dir;
    p.reach = 0;
    const Vec2d tip = p.anchor + p.hand_length * out_dir;
    if (!ray_hits_any(finger_points(tip, out_dir, gm), scene)) return p;
  }
  throw ContractError("sample_pose: could not place an off-table gesture");
}

GestureSample sample_frame(const Scene& scene, const GesturePose& pose, const NoiseSpec& noise,
                           const GestureModel& gm, Rng& rng) {
  const double dtheta = gaussian(0.0, noise.sigma_angle, rng);
  const Vec2d dir = rotate(pose.direction, dtheta);
  // The outlier anchor is the hand centroid; in-scenario anchors are where the arm starts.
  const Vec2d tip = pose.outlier ? Vec2d(pose.anchor + pose.hand_length * pose.direction)
                                 : Vec2d(pose.anchor + pose.reach * pose.direction);
  const Vec2d centroid = tip - pose.hand_length * pose.direction;

  GestureSample g;
  g.noise = pose.outlier;
  g.truth = pose.outlier ? BoxLabel{0, 0, 0, 0} : scene.target().bbox;
  const Vec2d c = centroid + gaussian2(noise.sigma_pos, rng);
  const Vec2d r = tip + gaussian2(noise.sigma_pos, rng);
  g.features = {fold_degrees(inclination_degrees(pose.direction) + dtheta), c.x(), c.y(), r.x(), r.y()};
  g.finger = finger_points(r, dir, gm);
  g.finger.flank_a += gaussian2(noise.sigma_pos, rng);
  g.finger.flank_b += gaussian2(noise.sigma_pos, rng);
  return g;
}

GestureSample synth_gesture(const Scene& scene, const NoiseSpec& noise, Rng& rng,
                            const GestureModel& gm, const TableGeometry& geo) {
  noise.validate();
  const bool outlier = noise.outlier_rate > 0 && std::uniform_real_distribution<double>(0, 1)(rng) < noise.outlier_rate;
  const auto pose = sample_pose(scene, gm, outlier, geo, rng);
  return sample_frame(scene, pose, noise, gm, rng);
}

void DatasetSpec::validate() const {
  if (classes.empty()) throw ContractError("dataset: no classes selected");
  if (per_scene_frames < 1 || per_scene_frames > 65535)
    throw ContractError("dataset: per_scene_frames must lie in [1, 65535]");
  noise.validate();
  geometry.validate();
}

bool FrameRecord::operator==(const FrameRecord& o) const {
  return features == o.features && truth == o.truth && scene_id == o.scene_id &&
         ambiguity == o.ambiguity && noise == o.noise && frame_index == o.frame_index &&
         finger.flank_a == o.finger.flank_a && finger.flank_b == o.finger.flank_b &&
         finger.tip == o.finger.tip;
}

std::vector<const FrameRecord*> Dataset::frames_of(std::uint32_t scene_id) const {
  std::vector<const FrameRecord*> out;
  for (const auto& f : frames)
    if (f.scene_id == scene_id) out.push_back(&f);
  return out;
}

Dataset generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset ds;
  ds.image_width = spec.geometry.image_width;
  ds.image_height = spec.geometry.image_height;
  for (auto& s : all_configs(spec.geometry))
    if (std::find(spec.classes.begin(), spec.classes.end(), s.ambiguity) != spec.classes.end())
      ds.scenes.push_back(std::move(s));

  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t id = 0; id < ds.scenes.size(); ++id) {
    auto& scene = ds.scenes[id];
    const auto pose = sample_pose(scene, spec.gesture, false, spec.geometry, rng);
    for (int f = 0; f < spec.per_scene_frames; ++f) {
      const bool outlier = spec.noise.outlier_rate > 0 && unit(rng) < spec.noise.outlier_rate;
      const auto g = outlier ? sample_frame(scene, sample_pose(scene, spec.gesture, true, spec.geometry, rng),
                                            spec.noise, spec.gesture, rng)
                             : sample_frame(scene, pose, spec.noise, spec.gesture, rng);
      ds.frames.push_back({g.features, g.truth, static_cast<std::uint32_t>(id), scene.ambiguity, g.noise,
                           static_cast<std::uint16_t>(f), g.finger});
    }
  }
  return ds;
}

Mask render_hand_mask(const GestureSample& g, int width, int height, const GestureModel& gm) {
  Mask mask = Mask::Zero(height, width);
  const Vec2d c = g.features.centroid(), tip = g.features.fingertip();
  const double len = (tip - c).norm();
  if (!(len > 0)) return mask;
  const Vec2d dir = (tip - c) / len;
  const double palm = 0.5 * len;
  const double radius = gm.finger_width / 2;
  const Vec2d base = c + dir * (0.4 * len);
  const int x0 = std::max(0, int(std::floor(std::min(c.x() - palm, tip.x() - radius))));
  const int x1 = std::min(width - 1, int(std::ceil(std::max(c.x() + palm, tip.x() + radius))));
  const int y0 = std::max(0, int(std::floor(std::min(c.y() - palm, tip.y() - radius))));
  const int y1 = std::min(height - 1, int(std::ceil(std::max(c.y() + palm, tip.y() + radius))));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2d p(x, y);
      bool in = (p - c).norm() <= palm;
      if (!in) {
        const double t = std::clamp((p - base).dot(tip - base) / (tip - base).squaredNorm(), 0.0, 1.0);
        in = (p - (base + t * (tip - base))).norm() <= radius;
      }
      if (in) mask(y, x) = 255;
    }
  }
  return mask;
}

RgbImage render_scene(const Scene& scene, const GestureSample& g, const TableGeometry& geo,
                      const GestureModel& gm) {
  RgbImage img(geo.image_width, geo.image_height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) img.set(x, y, 235, 235, 235);

  for (int row : {1, 2}) {
    for (const auto& o : scene.objects) {
      if (o.row != row) continue;
      const auto col = color_of(o.color);
      const BoxLabel b = geo.cube_box(o.position_cm);
      const int x0 = std::max(0, int(std::ceil(b.x1 - 0.5))), x1 = std::min(img.width, int(std::ceil(b.x2 - 0.5)));
      const int y0 = std::max(0, int(std::ceil(b.y1 - 0.5))), y1 = std::min(img.height, int(std::ceil(b.y2 - 0.5)));
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) img.set(x, y, col.r, col.g, col.b);
    }
  }

  const Mask hand = render_hand_mask(g, img.width, img.height, gm);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (hand(y, x)) img.set(x, y, 224, 172, 140);
  return img;
}

}  // namespace pointgwr
