#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "arcoord/calibration.hpp"
#include "arcoord/coordination.hpp"
#include "arcoord/geom3d.hpp"
#include "arcoord/planefit.hpp"
#include "arcoord/report.hpp"
#include "arcoord/socket.hpp"
#include "arcoord/trajectory.hpp"

namespace arcoord::sim {

/// Table top: a width (x) by depth (z) rectangle at y = height, centered on
/// (center.x, center.z). center.y is ignored.
struct TableSpec {
  Point3 center = Point3::Zero();
  double width = 1.2;
  double depth = 0.8;
  double height = 0.75;

  Point3 top_center() const { return {center.x(), height, center.z()}; }
};

/// Axis-aligned box that outlier points are drawn from.
struct RoomBox {
  Point3 min = Point3::Zero();
  Point3 max = Point3::Zero();
};

struct NoiseSpec {
  double pose_sigma_t = 0.0;     // meters, per axis
  double pose_sigma_r = 0.0;     // degrees, per axis
  double point_sigma = 0.0;      // meters, normal to the table top
  double outlier_fraction = 0.0; // share of scene points that are outliers
  double pixel_sigma = 0.0;      // marker keypoint pixels, per axis
};

/// Camera sweeping back and forth along an arc around the table, always
/// looking at the table-top center. Bearing 0 is +x; positive bearings turn
/// counterclockwise seen from +y.
struct ArcSpec {
  double radius = 1.0;
  double camera_height = 0.45;  // above the table top
  double bearing_deg = 0.0;
  double sweep_deg = 40.0;
  int frames = 300;
  double rate_hz = 30.0;
};

struct Scenario {
  TableSpec table;
  std::optional<RoomBox> room;  // defaults around the table
  double slam_scale = 1.0;      // metric / SLAM units
  Trajectory trajectory;        // ground-truth camera poses, room frame
  NoiseSpec noise;
  std::uint64_t rng_seed = 0;

  MarkerSpec marker{200.0, 200.0, 0.2, 0.2};
  int scene_points = 400;
  int calibration_frames = 10;
  int marker_keypoints = 40;
  RansacConfig ransac;
  /// Room pose of the SLAM frame; defaults to the first camera pose.
  std::optional<RigidTransform> slam_origin;

  /// Throws InvalidArgument.
  void validate() const;
  RoomBox room_box() const;
  RigidTransform slam_from_room() const;
};

Trajectory make_arc_trajectory(const TableSpec& table, const ArcSpec& arc);

/// Scenario with an arc trajectory and default settings.
Scenario default_scenario(std::uint64_t seed = 0);

/// JSON scenario file; see README for the schema.
Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(const std::string& text);

/// Room-frame point cloud: table-top samples first, then outliers drawn from
/// the room box. The split is exact: round(n * outlier_fraction) outliers.
std::vector<Point3> generate_scene(const Scenario& scenario);

struct SimFrame {
  std::size_t frame_index = 0;
  RigidTransform ground_truth_pose;  // room frame
  RigidTransform slam_pose;          // SLAM frame, SLAM units
  std::vector<Point3> map_points;    // SLAM frame, SLAM units
  std::vector<Correspondence> marker_correspondences;  // calibration frames only
};

/// What the SLAM system would report at time t: the ground truth moved into
/// the SLAM frame, noised, and shrunk by 1 / slam_scale. Times between
/// samples interpolate. Throws OutOfRange.
SimFrame simulate_slam_frame(const Scenario& scenario, double t);

/// Marker keypoints in marker-image pixels (noise free).
std::vector<Vec2> marker_keypoints(const Scenario& scenario);
/// Room-frame location of a marker pixel; the marker lies flat on the table,
/// centered, u along +x and v along +z.
Point3 marker_pixel_to_room(const Scenario& scenario, const Vec2& pixel);

/// Client-side localization and plane setup, before any networking.
struct LocalSetup {
  ScaleCalibration calibration;
  std::vector<Point3> metric_points;  // accumulated calibration map points
  RansacResult ransac;
  PlaneModel refined;
  PlaneFrame plane;
  std::vector<Point3> inliers;
};

/// Scale calibration, RANSAC, least-squares refinement and plane frame.
/// Throws CalibrationFailed or PlaneFitFailed.
LocalSetup prepare_local(const Scenario& scenario);

struct ClientOptions {
  /// Step frames in lockstep: after each pose, wait for the same frame from
  /// every peer. Otherwise free-run at rate_hz.
  bool lockstep = true;
  /// Wait for this many session members before streaming.
  int expected_users = 1;
  double rate_hz = 30.0;
  std::size_t max_frames = 0;  // 0 = the whole trajectory
  std::chrono::milliseconds timeout{10000};
  /// Called with the assigned id once WELCOME arrives.
  std::function<void(int)> on_welcome;
  std::chrono::milliseconds linger{200};  // free-run: listen after the last frame
};

/// Runs the full client pipeline against a coordination server.
/// Throws ConnectionFailed, CalibrationFailed, PlaneFitFailed or ModeMismatch.
ClientReport run_client(const Scenario& scenario, const net::Endpoint& server, SessionMode mode,
                        const ClientOptions& options = {});

struct SessionConfig {
  std::vector<Scenario> scenarios;  // one per client
  SessionMode mode = SessionMode::Classroom;
  std::optional<net::Endpoint> server;  // self-host when absent
  ClientOptions options;
};

/// Runs one client per scenario concurrently; reports ordered by user id.
std::vector<ClientReport> run_session(const SessionConfig& config);

}  // namespace arcoord::sim
