#include "arcoord/trajectory.hpp"

#include <string>

#include "arcoord/error.hpp"

namespace arcoord {

Trajectory::Trajectory(std::vector<TrajectorySample> samples) {
  samples_.reserve(samples.size());
  for (const auto& s : samples) push_back(s.timestamp, s.pose);
}

void Trajectory::push_back(double timestamp, const RigidTransform& pose) {
  if (!samples_.empty() && !(timestamp > samples_.back().timestamp)) {
    throw Error(ErrorCode::InvalidArgument, "trajectory timestamps must strictly increase (got " +
                                                std::to_string(timestamp) + " after " +
                                                std::to_string(samples_.back().timestamp) + ")");
  }
  samples_.push_back({timestamp, pose});
}

}  // namespace arcoord
