#pragma once

#include <random>
#include <vector>

#include "arcoord/geom3d.hpp"

namespace arcoord::testing {

struct PlaneScene {
  Eigen::Vector3d normal;
  Point3 centroid;  // of the generating inlier footprint
  std::vector<Point3> points;
  std::size_t inliers = 0;  // the first `inliers` points
};

/// Inliers on a 1 m x 1 m patch of a randomly oriented plane through
/// `center`, with Gaussian offsets along the normal; outliers uniform in the
/// 1 m cube around `center`.
inline PlaneScene make_plane_scene(std::mt19937_64& rng, std::size_t inliers, double sigma, std::size_t outliers,
                                   bool tilt = true) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  PlaneScene s;
  s.centroid = Point3(u(rng), u(rng), u(rng));
  s.normal = tilt ? Eigen::Vector3d(0.3 * g(rng), 1.0, 0.3 * g(rng)).normalized() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d a = s.normal.unitOrthogonal();
  const Eigen::Vector3d b = s.normal.cross(a);
  for (std::size_t i = 0; i < inliers; ++i) {
    s.points.push_back(s.centroid + u(rng) * a + u(rng) * b + sigma * g(rng) * s.normal);
  }
  for (std::size_t i = 0; i < outliers; ++i) s.points.push_back(s.centroid + Point3(u(rng), u(rng), u(rng)));
  s.inliers = inliers;
  return s;
}

inline double angle_between_normals_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double c = std::abs(a.normalized().dot(b.normalized()));
  return rad_to_deg(std::atan2(a.normalized().cross(b.normalized()).norm(), c));
}

}  // namespace arcoord::testing
