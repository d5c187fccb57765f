#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arcoord/geom3d.hpp"
#include "arcoord/polygon.hpp"

namespace arcoord {

/// Known-size calibration marker: image size in pixels, physical size in meters.
struct MarkerSpec {
  double width_pixels = 0.0;
  double height_pixels = 0.0;
  double width_meters = 0.0;
  double height_meters = 0.0;

  /// Throws InvalidArgument unless every field is positive and finite.
  void validate() const;
  double meters_per_pixel() const { return width_meters / width_pixels; }
};

/// Set when width and height meters-per-pixel differ by more than 1%; only
/// the width ratio enters the distance formula.
std::optional<std::string> anisotropy_warning(const MarkerSpec& marker);

/// Reads `key = value` lines (width_pixels, height_pixels, width_meters,
/// height_meters); '#' starts a comment.
MarkerSpec load_marker_spec(const std::filesystem::path& path);

/// A marker keypoint matched to a SLAM map point.
struct Correspondence {
  Vec2 marker_pixel = Vec2::Zero();
  Point3 map_point = Point3::Zero();
  double similarity = 0.0;
};

/// Two best matches with distinct pixels; ties go to the lexicographically
/// smaller pixel. Throws TooFewMatches or CoincidentPoints.
std::pair<Correspondence, Correspondence> select_top_pair(std::span<const Correspondence> matches);

/// Metric distance between two marker pixels. Throws CoincidentPoints.
double physical_distance(const MarkerSpec& marker, const Vec2& p1, const Vec2& p2);

/// Metric-over-SLAM distance ratio. Throws DegenerateMapPoints.
double scale_factor(double physical_distance, const Point3& p1, const Point3& p2);

/// Multiplies the translation by s; the rotation is left untouched.
/// Throws NonPositiveScale.
RigidTransform apply_scale(double s, const RigidTransform& t);
Point3 apply_scale(double s, const Point3& p);

struct ScaleCalibration {
  double scale = 1.0;
  Correspondence first;
  Correspondence second;
  double physical_distance = 0.0;
};

/// Full marker calibration: best pair, metric distance, then scale.
ScaleCalibration calibrate_scale(const MarkerSpec& marker, std::span<const Correspondence> matches);

}  // namespace arcoord
