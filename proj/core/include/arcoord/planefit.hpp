#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "arcoord/geom3d.hpp"
#include "arcoord/polygon.hpp"

namespace arcoord {

/// Infinite plane through `point` with unit `normal`.
struct PlaneModel {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitY();
  Point3 point = Point3::Zero();

  double signed_distance(const Point3& p) const { return normal.dot(p - point); }
};

/// Table frame: origin on the plane, y along the normal, x toward the viewer.
struct PlaneFrame {
  RigidTransform pose;

  Point3 origin() const { return pose.translation; }
  Eigen::Vector3d x_axis() const { return pose.rotation.col(0); }
  Eigen::Vector3d y_axis() const { return pose.rotation.col(1); }
  Eigen::Vector3d z_axis() const { return pose.rotation.col(2); }
};

struct RansacConfig {
  int iterations = 500;
  double inlier_threshold = 0.01;  // meters
  int min_inliers = 30;
  std::uint64_t seed = 0;
};

struct RansacResult {
  PlaneModel model;
  std::vector<std::size_t> inliers;
};

/// Consensus plane from 3-point samples. Deterministic for a fixed seed.
/// Throws TooFewPoints (< 3 points) or NoConsensus (< min_inliers).
RansacResult ransac_plane(std::span<const Point3> points, const RansacConfig& cfg);

/// Least-squares plane: centroid plus the right singular vector of the
/// centered point matrix for the smallest singular value.
/// Throws TooFewPoints or DegenerateCloud (collinear input).
PlaneModel refine_plane_lsq(std::span<const Point3> inliers);

/// Throws CameraAbovePlaneOrigin when the camera projects onto the origin.
PlaneFrame build_plane_frame(const PlaneModel& plane, const Point3& camera_position);

double sum_squared_distances(const PlaneModel& plane, std::span<const Point3> points);

/// Convex boundary of `points` expressed on the frame's xz-plane.
Polygon2 plane_boundary(const PlaneFrame& frame, std::span<const Point3> points);

/// Reads `x y z` (whitespace or comma separated) per line; '#' starts a comment.
std::vector<Point3> read_point_cloud(const std::filesystem::path& path);

}  // namespace arcoord
