#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace arcoord {

/// Point in a 3D frame, meters.
using Point3 = Eigen::Vector3d;

/// Rigid-body transform in SE(3).
///
/// Convention: right-handed axes, and a pose "of X with respect to F" maps
/// X-local coordinates into F coordinates (camera-to-world for cameras).
/// Rotation is stored as a matrix; quaternions only appear on the wire.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform translate(double x, double y, double z);
  static RigidTransform from_rotation(const Eigen::Matrix3d& rotation,
                                      const Eigen::Vector3d& translation = Eigen::Vector3d::Zero());
  static RigidTransform from_quaternion(const Eigen::Quaterniond& q, const Eigen::Vector3d& translation);

  /// Rotations about the coordinate axes; angles in degrees, positive is
  /// counterclockwise when looking down the axis toward the origin.
  static RigidTransform rot_x(double degrees);
  static RigidTransform rot_y(double degrees);
  static RigidTransform rot_z(double degrees);

  /// Unit quaternion with w >= 0.
  Eigen::Quaterniond quaternion() const;

  /// Largest elementwise deviation of R^T R from identity.
  double orthonormality_defect() const;
  bool is_valid(double tol = 1e-9) const;

  Eigen::Matrix4d matrix() const;

  bool operator==(const RigidTransform&) const = default;
};

/// Matrix product a * b: apply b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);
Point3 transform_point(const RigidTransform& t, const Point3& p);

/// Angle in degrees of the relative rotation R_a^T R_b, in [0, 180].
double rotation_angle_between(const RigidTransform& a, const RigidTransform& b);

/// Nearest proper rotation (polar decomposition via SVD).
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m);

/// Largest absolute elementwise difference of the two 4x4 matrices.
double max_abs_difference(const RigidTransform& a, const RigidTransform& b);

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) { return compose(a, b); }

constexpr double kPi = 3.14159265358979323846;
constexpr double deg_to_rad(double d) { return d * kPi / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace arcoord
