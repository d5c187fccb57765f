#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "arcoord/geom3d.hpp"

namespace arcoord {

enum class SessionMode { Classroom, Collaboration };

std::string_view to_string(SessionMode mode);
/// Accepts "classroom" / "collaboration" in any letter case.
std::optional<SessionMode> parse_session_mode(std::string_view text);

/// A user's seat: index in [0, total_users).
struct UserSlot {
  int user_id = 0;
  int total_users = 1;

  /// Throws InvalidArgument when the invariant does not hold.
  void validate() const;
};

/// Seat of `user_id` in a membership list: its rank in the sorted id list,
/// so departed users leave no holes in the seating.
UserSlot slot_from_membership(int user_id, std::span<const int> user_ids);

/// SLAM-to-plane transform: the inverse of the plane pose.
RigidTransform slam_to_plane(const RigidTransform& plane_pose);

/// Camera pose relative to the plane frame (both inputs in one SLAM frame).
RigidTransform camera_in_plane(const RigidTransform& plane_pose, const RigidTransform& camera_pose);

/// Places a peer's plane-relative pose into the local SLAM frame.
RigidTransform peer_in_local_slam(const RigidTransform& local_plane_pose, const RigidTransform& peer_rel_pose);

/// Seat angle in degrees: 360 / N * i.
double collaboration_angle(const UserSlot& slot);

/// Rotates the plane frame about its own origin and y-axis
/// (counterclockwise seen from +y).
RigidTransform rotate_plane_frame(const RigidTransform& plane_pose, double theta_degrees);

/// Plane frame a user shares with everyone else in the session: unchanged in
/// Classroom mode, rotated to the user's seat in Collaboration mode.
RigidTransform effective_plane_pose(const RigidTransform& plane_pose, SessionMode mode, const UserSlot& slot);

}  // namespace arcoord
