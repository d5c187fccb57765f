#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "arcoord/coordination.hpp"
#include "arcoord/planefit.hpp"
#include "arcoord/polygon.hpp"
#include "arcoord/trajectory.hpp"

namespace arcoord {

/// Everything one simulated client observed in a session. Timestamps are
/// scenario time, never wall-clock time, so reports are reproducible.
struct ClientReport {
  int user_id = 0;
  int total_users = 0;
  SessionMode mode = SessionMode::Classroom;
  double scale = 1.0;
  double true_scale = 1.0;  // scenario slam_scale, for evaluation only

  PlaneFrame plane;                // metric local SLAM frame
  RigidTransform effective_plane;  // plane frame after the seat rotation
  Polygon2 boundary;               // own table, effective plane xz
  Polygon2 intersection;           // last INTERSECTION received

  Trajectory ground_truth;  // room frame, meters
  Trajectory slam_raw;      // SLAM frame, unscaled
  Trajectory slam_metric;   // SLAM frame after scale calibration
  Trajectory relative;      // camera in the effective plane frame, as sent

  std::map<int, Trajectory> peers;          // avatars in the local metric SLAM frame
  std::map<int, Trajectory> peer_relative;  // plane-relative poses as received
};

std::string report_to_json(const ClientReport& report);
/// Throws InvalidArgument on schema errors.
ClientReport report_from_json(const std::string& text);

void write_report(const std::filesystem::path& path, const ClientReport& report);
ClientReport read_report(const std::filesystem::path& path);

}  // namespace arcoord
