#pragma once

#include "pointgwr/baseline.hpp"
#include "pointgwr/image.hpp"
#include "pointgwr/types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pointgwr {

/// Tabletop layout in centimeters and the pinhole camera that views it.
/// Table coordinates: X lateral (right positive, seen from the robot), Y
/// forward from the robot, Z up from the table plane.
struct TableGeometry {
  double area{40.0};
  double row1_from_robot{28.0};
  double row2_from_robot{21.0};
  double cube_edge{5.8};
  double subject_distance{100.0};  // d1
  double subject_gap{20.0};        // d2
  double d4{65.0};
  double d6{72.0};

  double camera_height{30.0};
  double camera_pitch_deg{40.0};
  double focal_px{500.0};
  double principal_x{350.0};
  double principal_y{450.0};
  int image_width{700};
  int image_height{900};

  /// Table plane (X, Y, 1) to homogeneous pixel coordinates.
  Mat3d homography() const;

  Vec2d table_to_image(const Vec2d& table) const;
  Vec2d image_to_table(const Vec2d& pixel) const;
  /// Projects a 3D table-frame point.
  Vec2d project(double x, double y, double z) const;

  /// Image bounding box of an axis-aligned cube resting on the table.
  BoxLabel cube_box(const Vec2d& center) const;

  double half_extent() const { return area / 2; }
  void validate() const;
};

enum class AmbiguityClass : std::uint8_t { None = 0, A1 = 1, A2 = 2, A3 = 3, A4 = 4 };

const char* to_string(AmbiguityClass c);
AmbiguityClass ambiguity_class_from_string(const std::string& s);

inline constexpr AmbiguityClass kAllClasses[] = {AmbiguityClass::None, AmbiguityClass::A1,
                                                 AmbiguityClass::A2, AmbiguityClass::A3,
                                                 AmbiguityClass::A4};

/// Edge-to-edge lateral gap in cm; negative values overlap.
double class_gap(AmbiguityClass c);

struct SceneObject {
  std::string color;
  Vec2d position_cm{0, 0};
  int row{1};  // 1 or 2
  BoxLabel bbox;
};

struct Scene {
  AmbiguityClass ambiguity{AmbiguityClass::None};
  std::vector<SceneObject> objects;
  std::size_t target_index{0};

  std::vector<DetectedObject> detected() const;
  const SceneObject& target() const { return objects.at(target_index); }
};

/// Number of layouts for a class and object count; 0 when the pair is not
/// part of the experimental design.
std::size_t config_count(AmbiguityClass c, int n_objects);

/// Every layout for a class and object count. Throws ContractError for an
/// invalid pair.
std::vector<Scene> enumerate_configs(AmbiguityClass c, int n_objects,
                                     const TableGeometry& geo = {});

/// All layouts of the experimental design, ordered by class then object count.
std::vector<Scene> all_configs(const TableGeometry& geo = {});

struct NoiseSpec {
  double sigma_angle{2.0};  // degrees
  double sigma_pos{5.0};    // pixels
  double outlier_rate{0.0};
  void validate() const;
};

/// Per-gesture hand pose; frames jitter around it.
struct GesturePose {
  Vec2d anchor{315, 180};
  Vec2d direction{0, 1};
  double reach{0};
  double hand_length{60};
  bool outlier{false};
};

struct GestureSample {
  FeatureVector features;
  FingerPoints finger;
  BoxLabel truth;
  bool noise{false};
};

struct GestureModel {
  Vec2d anchor{315, 180};
  double anchor_jitter{8.0};
  double standoff_mean{150.0};
  double standoff_sd{6.0};
  double hand_length_mean{60.0};
  double hand_length_sd{3.0};
  double finger_length{30.0};
  double finger_width{14.0};
};

using Rng = std::mt19937_64;

GesturePose sample_pose(const Scene& scene, const GestureModel& gm, bool outlier,
                        const TableGeometry& geo, Rng& rng);

/// One frame of a gesture with per-frame measurement noise.
GestureSample sample_frame(const Scene& scene, const GesturePose& pose, const NoiseSpec& noise,
                           const GestureModel& gm, Rng& rng);

/// A single frame drawn from a fresh pose; outliers drawn at noise.outlier_rate.
GestureSample synth_gesture(const Scene& scene, const NoiseSpec& noise, Rng& rng,
                            const GestureModel& gm = {}, const TableGeometry& geo = {});

struct DatasetSpec {
  std::vector<AmbiguityClass> classes{std::begin(kAllClasses), std::end(kAllClasses)};
  int per_scene_frames{80};
  NoiseSpec noise;
  GestureModel gesture;
  TableGeometry geometry;
  std::uint64_t seed{42};
  void validate() const;
};

struct FrameRecord {
  FeatureVector features;
  BoxLabel truth;
  std::uint32_t scene_id{0};
  AmbiguityClass ambiguity{AmbiguityClass::None};
  bool noise{false};
  std::uint16_t frame_index{0};
  FingerPoints finger;

  bool operator==(const FrameRecord& o) const;
};

struct Dataset {
  int image_width{700};
  int image_height{900};
  std::vector<Scene> scenes;
  std::vector<FrameRecord> frames;

  std::vector<const FrameRecord*> frames_of(std::uint32_t scene_id) const;
};

Dataset generate_dataset(const DatasetSpec& spec);

/// Draws the cubes and a flat-shaded pointing hand for a gesture frame.
RgbImage render_scene(const Scene& scene, const GestureSample& g, const TableGeometry& geo = {},
                      const GestureModel& gm = {});

/// Ground-truth skin mask matching render_scene.
Mask render_hand_mask(const GestureSample& g, int width, int height, const GestureModel& gm = {});

}  // namespace pointgwr
