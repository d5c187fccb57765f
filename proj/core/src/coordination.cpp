#include "arcoord/coordination.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "arcoord/error.hpp"

namespace arcoord {

std::string_view to_string(SessionMode mode) {
  return mode == SessionMode::Classroom ? "classroom" : "collaboration";
}

std::optional<SessionMode> parse_session_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "classroom") return SessionMode::Classroom;
  if (lower == "collaboration") return SessionMode::Collaboration;
  return std::nullopt;
}

void UserSlot::validate() const {
  if (total_users < 1 || user_id < 0 || user_id >= total_users) {
    throw Error(ErrorCode::InvalidArgument,
                "user slot " + std::to_string(user_id) + " out of range for " + std::to_string(total_users) + " users");
  }
}

UserSlot slot_from_membership(int user_id, std::span<const int> user_ids) {
  std::vector<int> sorted(user_ids.begin(), user_ids.end());
  std::sort(sorted.begin(), sorted.end());
  auto it = std::lower_bound(sorted.begin(), sorted.end(), user_id);
  if (it == sorted.end() || *it != user_id) {
    throw Error(ErrorCode::UnknownUser, "user " + std::to_string(user_id) + " is not in the membership list");
  }
  return {static_cast<int>(it - sorted.begin()), static_cast<int>(sorted.size())};
}

RigidTransform slam_to_plane(const RigidTransform& plane_pose) { return invert(plane_pose); }

RigidTransform camera_in_plane(const RigidTransform& plane_pose, const RigidTransform& camera_pose) {
  return compose(slam_to_plane(plane_pose), camera_pose);
}

RigidTransform peer_in_local_slam(const RigidTransform& local_plane_pose, const RigidTransform& peer_rel_pose) {
  return compose(local_plane_pose, peer_rel_pose);
}

double collaboration_angle(const UserSlot& slot) {
  slot.validate();
  return 360.0 / slot.total_users * slot.user_id;
}

RigidTransform rotate_plane_frame(const RigidTransform& plane_pose, double theta_degrees) {
  return compose(plane_pose, RigidTransform::rot_y(theta_degrees));
}

RigidTransform effective_plane_pose(const RigidTransform& plane_pose, SessionMode mode, const UserSlot& slot) {
  if (mode == SessionMode::Classroom) return plane_pose;
  return rotate_plane_frame(plane_pose, collaboration_angle(slot));
}

}  // namespace arcoord
