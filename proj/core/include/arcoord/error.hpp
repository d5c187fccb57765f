#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arcoord {

enum class ErrorCode {
  InvalidArgument,
  Io,
  // planefit
  TooFewPoints,
  NoConsensus,
  DegenerateCloud,
  CameraAbovePlaneOrigin,
  // polygon
  DegenerateInput,
  // calibration
  TooFewMatches,
  CoincidentPoints,
  DegenerateMapPoints,
  NonPositiveScale,
  // protocol
  OversizeMessage,
  MalformedFrame,
  UnknownType,
  InvalidPose,
  NonMonotonicSeq,
  // server
  ModeMismatch,
  UnknownUser,
  DegenerateBoundary,
  NotRegistered,
  // simclient
  OutOfRange,
  ConnectionFailed,
  CalibrationFailed,
  PlaneFitFailed,
  // evaluation
  EmptyOverlap,
  DeltaTooLarge,
  EmptyInput,
  // occlusion
  DimensionMismatch,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error code; every failure in the
/// library surfaces as one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace arcoord
