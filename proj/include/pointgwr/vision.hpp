#pragma once

#include "pointgwr/contour.hpp"
#include "pointgwr/image.hpp"
#include "pointgwr/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pointgwr {

struct YCbCr {
  std::uint8_t y{0}, cb{0}, cr{0};
};

/// BT.601 full-range conversion, rounded half-up and clamped to [0, 255].
YCbCr rgb_to_ycbcr(std::uint8_t r, std::uint8_t g, std::uint8_t b);

struct ChromaPixel {
  std::uint8_t cb{0}, cr{0};
};

/// Naive-Bayes skin classifier over 2D (Cb, Cr) histograms.
struct SkinModel {
  static constexpr std::size_t kBins = 256 * 256;

  std::vector<std::uint64_t> skin_hist = std::vector<std::uint64_t>(kBins, 0);
  std::vector<std::uint64_t> nonskin_hist = std::vector<std::uint64_t>(kBins, 0);
  std::uint64_t total_skin{0};
  std::uint64_t total_nonskin{0};
  double theta{5.0};

  static std::size_t bin(std::uint8_t cb, std::uint8_t cr) { return std::size_t{cb} * 256 + cr; }

  std::uint64_t skin(std::uint8_t cb, std::uint8_t cr) const { return skin_hist[bin(cb, cr)]; }
  std::uint64_t nonskin(std::uint8_t cb, std::uint8_t cr) const { return nonskin_hist[bin(cb, cr)]; }

  /// Likelihood-ratio test at one chroma value. Colors seen only as skin
  /// count as skin; colors never seen do not.
  bool is_skin(std::uint8_t cb, std::uint8_t cr) const;

  void validate() const;
};

SkinModel fit_skin_model(std::span<const ChromaPixel> skin, std::span<const ChromaPixel> nonskin,
                         double theta = 5.0);

/// Builds a model from an image and a binary annotation mask (non-zero = skin).
SkinModel fit_skin_model(const RgbImage& image, const Mask& annotation, double theta = 5.0);

Mask classify_skin(const SkinModel& model, const RgbImage& image);

struct Hsv {
  double h{0};  // [0, 360)
  double s{0};  // [0, 1]
  double v{0};  // [0, 1]
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Named HSV interval. The hue interval is half-open and wraps through 0
/// when h_min > h_max.
struct HueRange {
  std::string name;
  double h_min{0}, h_max{0};
  double s_min{0}, v_min{0};

  bool contains(const Hsv& p) const;
};

/// Throws ContractError when two hue intervals overlap or a bound is out of range.
void validate_hue_ranges(std::span<const HueRange> ranges);

/// The red, green, yellow and blue cube colors used by the simulator.
std::vector<HueRange> default_hue_ranges();

inline constexpr std::size_t kMinObjectArea = 100;

Mask color_mask(const RgbImage& image, const HueRange& range);

/// Objects per color, in range order, then raster order of the component.
std::vector<DetectedObject> segment_color_objects(const RgbImage& image,
                                                  std::span<const HueRange> ranges,
                                                  std::size_t min_area = kMinObjectArea);

struct FingertipParams {
  int neighbor_step{12};
  double defect_depth{10.0};
  double cluster_cutoff{25.0};
  double max_angle{90.0};
  // Clusters whose apex lies closer to the hand centroid than this fraction
  // of the farthest apex are knuckles or palm corners, not fingertips.
  double extension_ratio{0.8};
  double weight_scale{100.0};
};

struct FingertipGeometry {
  Contour contour;
  std::vector<int> hull;
  std::vector<ConvexityDefect> defects;  // depth at or above the threshold
  Vec2d centroid{0, 0};
  Vec2d tip{0, 0};     // rho
  Vec2d flank_a{0, 0}; // Psi_11
  Vec2d flank_b{0, 0}; // Psi_12
  double delta{0};     // vertex angle at the tip, degrees
};

std::optional<FingertipGeometry> detect_fingertip(const Mask& mask, const FingertipParams& p = {});

/// Inclination of the weighted principal axis of the contour about the
/// fingertip, in [0, 180).
double pointing_angle(std::span<const Vec2d> contour, const Vec2d& tip,
                      double weight_scale = FingertipParams{}.weight_scale);

std::optional<FeatureVector> extract_features(const Mask& mask, const FingertipParams& p = {});

FeatureVector features_from_geometry(const FingertipGeometry& g, const FingertipParams& p = {});

}  // namespace pointgwr
