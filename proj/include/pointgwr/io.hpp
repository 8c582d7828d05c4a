#pragma once

#include "pointgwr/eval.hpp"
#include "pointgwr/image.hpp"
#include "pointgwr/prediction.hpp"
#include "pointgwr/scene.hpp"
#include "pointgwr/vision.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace pointgwr {

inline constexpr int kModelFormatVersion = 1;
inline constexpr std::uint8_t kDatasetVersion = 1;

nlohmann::json model_to_json(const Network& net);
Network model_from_json(const nlohmann::json& j);

void save_model(const Network& net, const std::filesystem::path& path);
Network load_model(const std::filesystem::path& path);

/// Little-endian binary layout:
///   "PGWRDS" u8 version u8 0
///   u32 image_width, u32 image_height, u32 n_scenes, u32 n_frames
///   n_scenes x (u32 byte length, scene payload)
///   n_frames x (u32 byte length, frame payload)
/// Scene payload: u8 class, u32 target_index, u32 n_objects, then per object
///   u32 color length, color bytes, f64 x_cm, f64 y_cm, u8 row, f64 x1 y1 x2 y2.
/// Frame payload (112 bytes): f64 alpha cx cy rho_x rho_y, f64 x1 y1 x2 y2,
///   u32 scene_id, u8 class, u8 noise, u16 frame_index,
///   f64 flank_a.x flank_a.y flank_b.x flank_b.y.
void write_dataset(const Dataset& ds, std::ostream& out);
Dataset read_dataset(std::istream& in);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

/// PNG (8-bit gray, gray+alpha, RGB or RGBA) or binary PPM (P6).
RgbImage load_image(const std::filesystem::path& path);
void save_png(const RgbImage& img, const std::filesystem::path& path);
void save_png(const Mask& mask, const std::filesystem::path& path);
void save_ppm(const RgbImage& img, const std::filesystem::path& path);
/// Any non-zero channel marks foreground.
Mask load_mask(const std::filesystem::path& path);

nlohmann::json to_json(const BoxLabel& b);
nlohmann::json to_json(const Prediction& p);
nlohmann::json to_json(const EvalReport& r);
nlohmann::json to_json(const CrossvalResult& r);
nlohmann::json to_json(const DetectedObject& o);
nlohmann::json to_json(const FeatureVector& v);

/// Per-class table: Class, Precision, Recall, F1, Misses, then counts.
std::string summary_csv(const EvalReport& r);
/// Per-class table with mean and population std across folds.
std::string summary_csv(const CrossvalResult& r);
/// One row per (a_T, epochs) cell: nodes, quantization error and totals.
std::string sweep_csv(std::span<const CrossvalResult> cells);

/// Sparse histogram form: {"theta", "skin": [[cb, cr, count], ...], "nonskin": [...]}.
nlohmann::json skin_model_to_json(const SkinModel& m);
SkinModel skin_model_from_json(const nlohmann::json& j);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace pointgwr
