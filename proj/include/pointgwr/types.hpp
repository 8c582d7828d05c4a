#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pointgwr {

inline constexpr int kFeatureDim = 5;

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec5 = Eigen::Matrix<Scalar, kFeatureDim, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

using Vec2d = Vec2<double>;
using Vec5d = Vec5<double>;
using Mat3d = Mat3<double>;

// Precondition or argument violated by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Input data is malformed, inconsistent or unsupported.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box in pixel coordinates: (x1, y1) top-left, (x2, y2)
/// bottom-right. Valid boxes have x1 < x2 and y1 < y2.
template <typename Scalar>
struct Box {
  Scalar x1{0}, y1{0}, x2{1}, y2{1};

  static Box from_center(const Vec2<Scalar>& c, Scalar w, Scalar h) {
    return {c.x() - w / 2, c.y() - h / 2, c.x() + w / 2, c.y() + h / 2};
  }

  Vec2<Scalar> centroid() const { return {(x1 + x2) / 2, (y1 + y2) / 2}; }
  Scalar width() const { return x2 - x1; }
  Scalar height() const { return y2 - y1; }
  Scalar area() const { return valid() ? width() * height() : Scalar(0); }

  bool valid() const {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
           std::isfinite(y2) && x1 < x2 && y1 < y2;
  }

  bool contains(const Box& o) const {
    return x1 <= o.x1 && y1 <= o.y1 && x2 >= o.x2 && y2 >= o.y2;
  }

  bool operator==(const Box&) const = default;
};

using BoxLabel = Box<double>;

template <typename Scalar>
Scalar intersection_area(const Box<Scalar>& a, const Box<Scalar>& b) {
  const Scalar w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const Scalar h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  return (w > 0 && h > 0) ? w * h : Scalar(0);
}

template <typename Scalar>
Scalar iou(const Box<Scalar>& a, const Box<Scalar>& b) {
  const Scalar inter = intersection_area(a, b);
  const Scalar uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : Scalar(0);
}

template <typename Scalar>
Box<Scalar> bounding_union(const Box<Scalar>& a, const Box<Scalar>& b) {
  return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2),
          std::max(a.y2, b.y2)};
}

/// A colored object found in (or placed into) a scene.
struct DetectedObject {
  std::string color;
  BoxLabel bbox;
  bool operator==(const DetectedObject&) const = default;
};

/// Gesture descriptor (alpha, c_x, c_y, rho_x, rho_y): pointing angle in
/// degrees, hand-contour centroid and fingertip in pixels.
struct FeatureVector {
  double alpha{0};
  double cx{0}, cy{0};
  double rho_x{0}, rho_y{0};

  Vec5d as_vector() const { return {alpha, cx, cy, rho_x, rho_y}; }
  static FeatureVector from_vector(const Vec5d& v) {
    return {v[0], v[1], v[2], v[3], v[4]};
  }
  Vec2d centroid() const { return {cx, cy}; }
  Vec2d fingertip() const { return {rho_x, rho_y}; }

  bool operator==(const FeatureVector&) const = default;
};

/// Maps raw features into the space the network measures distances in.
/// With `normalize` each dimension is min-max scaled by fixed scenario
/// bounds: alpha by [0, 180], x by [0, width], y by [0, height].
struct FeatureSpace {
  bool normalize{true};
  double image_width{700};
  double image_height{900};

  Vec5d scale() const {
    if (!normalize) return Vec5d::Ones();
    return {1.0 / 180.0, 1.0 / image_width, 1.0 / image_height,
            1.0 / image_width, 1.0 / image_height};
  }

  Vec5d map(const FeatureVector& f) const {
    return f.as_vector().cwiseProduct(scale());
  }

  FeatureVector unmap(const Vec5d& v) const {
    return FeatureVector::from_vector(v.cwiseQuotient(scale()));
  }

  // Label centroids are always compared in image-normalized coordinates.
  Vec2d normalize_point(const Vec2d& p) const {
    return {p.x() / image_width, p.y() / image_height};
  }

  bool operator==(const FeatureSpace&) const = default;
};

/// Folds an angle in degrees into [0, 180).
inline double fold_degrees(double deg) {
  double a = std::fmod(deg, 180.0);
  if (a < 0) a += 180.0;
  if (a >= 180.0) a -= 180.0;
  return a;
}

/// Inclination of an image-space direction (y pointing down) measured
/// counter-clockwise from the +x axis, folded into [0, 180).
inline double inclination_degrees(const Vec2d& dir) {
  constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;
  return fold_degrees(std::atan2(-dir.y(), dir.x()) * kRadToDeg);
}

}  // namespace pointgwr
