#pragma once

#include <vector>

#include "arcoord/geom3d.hpp"

namespace arcoord {

struct TrajectorySample {
  double timestamp = 0.0;  // seconds
  RigidTransform pose;
};

/// Poses ordered by strictly increasing timestamp.
class Trajectory {
 public:
  Trajectory() = default;
  /// Throws InvalidArgument unless timestamps strictly increase.
  explicit Trajectory(std::vector<TrajectorySample> samples);

  /// Throws InvalidArgument if timestamp is not after the last sample.
  void push_back(double timestamp, const RigidTransform& pose);

  const std::vector<TrajectorySample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const TrajectorySample& operator[](std::size_t i) const { return samples_[i]; }

  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

 private:
  std::vector<TrajectorySample> samples_;
};

}  // namespace arcoord
