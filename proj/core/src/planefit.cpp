#include "arcoord/planefit.hpp"

#include <Eigen/SVD>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "arcoord/error.hpp"

namespace arcoord {

namespace {

constexpr double kCollinearEps = 1e-12;
constexpr double kRankEps = 1e-12;
constexpr double kProjectionEps = 1e-9;

std::vector<std::size_t> collect_inliers(const PlaneModel& m, std::span<const Point3> points, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs(m.signed_distance(points[i])) <= threshold) out.push_back(i);
  }
  return out;
}

}  // namespace

RansacResult ransac_plane(std::span<const Point3> points, const RansacConfig& cfg) {
  if (points.size() < 3) throw Error(ErrorCode::TooFewPoints, "RANSAC needs at least 3 points");
  if (cfg.iterations < 1 || !(cfg.inlier_threshold > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "RANSAC needs iterations >= 1 and a positive threshold");
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);

  // Collinear samples do not count as iterations; the attempt cap only
  // guards against clouds that are collinear everywhere.
  const long max_attempts = 100L * cfg.iterations;
  long attempts = 0;
  int candidates = 0;
  std::size_t best_count = 0;
  PlaneModel best;
  bool have_best = false;

  while (candidates < cfg.iterations && attempts < max_attempts) {
    ++attempts;
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    const std::size_t k = pick(rng);
    if (i == j || j == k || i == k) continue;

    const Eigen::Vector3d n = (points[j] - points[i]).cross(points[k] - points[i]);
    const double norm = n.norm();
    if (norm < kCollinearEps) continue;
    ++candidates;

    const PlaneModel candidate{n / norm, points[i]};
    std::size_t count = 0;
    for (const auto& p : points) {
      if (std::abs(candidate.signed_distance(p)) <= cfg.inlier_threshold) ++count;
    }
    if (!have_best || count > best_count) {
      best = candidate;
      best_count = count;
      have_best = true;
    }
  }

  if (!have_best || best_count < static_cast<std::size_t>(std::max(cfg.min_inliers, 0))) {
    throw Error(ErrorCode::NoConsensus,
                "best plane has " + std::to_string(best_count) + " inliers, need " + std::to_string(cfg.min_inliers));
  }
  return {best, collect_inliers(best, points, cfg.inlier_threshold)};
}

PlaneModel refine_plane_lsq(std::span<const Point3> inliers) {
  if (inliers.size() < 3) throw Error(ErrorCode::TooFewPoints, "least-squares plane needs at least 3 points");

  Point3 centroid = Point3::Zero();
  for (const auto& p : inliers) centroid += p;
  centroid /= static_cast<double>(inliers.size());

  Eigen::MatrixXd centered(inliers.size(), 3);
  for (std::size_t i = 0; i < inliers.size(); ++i) centered.row(static_cast<Eigen::Index>(i)) = (inliers[i] - centroid).transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(1) < kRankEps * sv(0)) {
    throw Error(ErrorCode::DegenerateCloud, "points are collinear or coincident");
  }
  return {svd.matrixV().col(2).normalized(), centroid};
}

PlaneFrame build_plane_frame(const PlaneModel& plane, const Point3& camera_position) {
  const Eigen::Vector3d to_camera = camera_position - plane.point;
  Eigen::Vector3d y = plane.normal.normalized();
  if (to_camera.dot(y) < 0.0) y = -y;

  const Eigen::Vector3d projected = to_camera - to_camera.dot(y) * y;
  if (projected.norm() <= kProjectionEps) {
    throw Error(ErrorCode::CameraAbovePlaneOrigin, "camera projects onto the plane origin");
  }
  const Eigen::Vector3d x = projected.normalized();
  const Eigen::Vector3d z = x.cross(y);

  PlaneFrame frame;
  frame.pose.rotation.col(0) = x;
  frame.pose.rotation.col(1) = y;
  frame.pose.rotation.col(2) = z;
  frame.pose.translation = plane.point;
  return frame;
}

double sum_squared_distances(const PlaneModel& plane, std::span<const Point3> points) {
  double sum = 0.0;
  for (const auto& p : points) {
    const double d = plane.signed_distance(p);
    sum += d * d;
  }
  return sum;
}

Polygon2 plane_boundary(const PlaneFrame& frame, std::span<const Point3> points) {
  const RigidTransform to_plane = invert(frame.pose);
  std::vector<Vec2> xz;
  xz.reserve(points.size());
  for (const auto& p : points) {
    const Point3 local = transform_point(to_plane, p);
    xz.emplace_back(local.x(), local.z());
  }
  return convex_hull(xz);
}

std::vector<Point3> read_point_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open point cloud " + path.string());

  std::vector<Point3> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream fields(line);
    double x = 0, y = 0, z = 0;
    if (!(fields >> x)) continue;
    if (!(fields >> y >> z)) {
      throw Error(ErrorCode::Io, path.string() + ":" + std::to_string(line_no) + ": expected x y z");
    }
    points.emplace_back(x, y, z);
  }
  return points;
}

}  // namespace arcoord
