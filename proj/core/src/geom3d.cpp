#include "arcoord/geom3d.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace arcoord {

namespace {

// Composition chains drift; project back once the defect is noticeable.
constexpr double kReorthoThreshold = 1e-9;

}  // namespace

RigidTransform RigidTransform::translate(double x, double y, double z) {
  RigidTransform t;
  t.translation = {x, y, z};
  return t;
}

RigidTransform RigidTransform::from_rotation(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation) {
  return {rotation, translation};
}

RigidTransform RigidTransform::from_quaternion(const Eigen::Quaterniond& q, const Eigen::Vector3d& translation) {
  return {q.normalized().toRotationMatrix(), translation};
}

RigidTransform RigidTransform::rot_x(double degrees) {
  const double c = std::cos(deg_to_rad(degrees));
  const double s = std::sin(deg_to_rad(degrees));
  RigidTransform t;
  t.rotation << 1, 0, 0,
                0, c, -s,
                0, s, c;
  return t;
}

RigidTransform RigidTransform::rot_y(double degrees) {
  const double c = std::cos(deg_to_rad(degrees));
  const double s = std::sin(deg_to_rad(degrees));
  RigidTransform t;
  t.rotation << c, 0, s,
                0, 1, 0,
                -s, 0, c;
  return t;
}

RigidTransform RigidTransform::rot_z(double degrees) {
  const double c = std::cos(deg_to_rad(degrees));
  const double s = std::sin(deg_to_rad(degrees));
  RigidTransform t;
  t.rotation << c, -s, 0,
                s, c, 0,
                0, 0, 1;
  return t;
}

Eigen::Quaterniond RigidTransform::quaternion() const {
  Eigen::Quaterniond q(rotation);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return q;
}

double RigidTransform::orthonormality_defect() const {
  return (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

bool RigidTransform::is_valid(double tol) const {
  return rotation.allFinite() && translation.allFinite() && orthonormality_defect() <= tol &&
         std::abs(rotation.determinant() - 1.0) <= tol;
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  if (out.orthonormality_defect() > kReorthoThreshold) out.rotation = nearest_rotation(out.rotation);
  return out;
}

RigidTransform invert(const RigidTransform& t) {
  RigidTransform out;
  out.rotation = t.rotation.transpose();
  out.translation = -(out.rotation * t.translation);
  return out;
}

Point3 transform_point(const RigidTransform& t, const Point3& p) { return t.rotation * p + t.translation; }

double rotation_angle_between(const RigidTransform& a, const RigidTransform& b) {
  const Eigen::Matrix3d rel = a.rotation.transpose() * b.rotation;
  // atan2 keeps precision near 0 where acos of the trace does not.
  const Eigen::Vector3d axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  const double s = 0.5 * axis.norm();
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return rad_to_deg(std::atan2(s, c));
}

double max_abs_difference(const RigidTransform& a, const RigidTransform& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace arcoord
