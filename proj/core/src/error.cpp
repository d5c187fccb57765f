#include "arcoord/error.hpp"

namespace arcoord {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NoConsensus: return "NoConsensus";
    case ErrorCode::DegenerateCloud: return "DegenerateCloud";
    case ErrorCode::CameraAbovePlaneOrigin: return "CameraAbovePlaneOrigin";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::TooFewMatches: return "TooFewMatches";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::DegenerateMapPoints: return "DegenerateMapPoints";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::OversizeMessage: return "OversizeMessage";
    case ErrorCode::MalformedFrame: return "MalformedFrame";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::InvalidPose: return "InvalidPose";
    case ErrorCode::NonMonotonicSeq: return "NonMonotonicSeq";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::DegenerateBoundary: return "DegenerateBoundary";
    case ErrorCode::NotRegistered: return "NotRegistered";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ConnectionFailed: return "ConnectionFailed";
    case ErrorCode::CalibrationFailed: return "CalibrationFailed";
    case ErrorCode::PlaneFitFailed: return "PlaneFitFailed";
    case ErrorCode::EmptyOverlap: return "EmptyOverlap";
    case ErrorCode::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace arcoord
