#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "arcoord/coordination.hpp"
#include "arcoord/geom3d.hpp"
#include "arcoord/polygon.hpp"

namespace arcoord::protocol {

/// Frames carry a 4-byte big-endian payload length, then a UTF-8 JSON object
/// whose first member is "type". Field order within each type is fixed.
inline constexpr std::size_t kHeaderBytes = 4;
inline constexpr std::size_t kMaxPayloadBytes = 1u << 20;
inline constexpr double kQuaternionTolerance = 1e-6;

/// Pose on the wire: translation in meters, rotation as a unit quaternion
/// (w, x, y, z) with w >= 0.
struct PoseWire {
  std::array<double, 3> translation{0.0, 0.0, 0.0};
  std::array<double, 4> rotation{1.0, 0.0, 0.0, 0.0};

  bool operator==(const PoseWire&) const = default;
};

PoseWire to_wire(const RigidTransform& t);
RigidTransform from_wire(const PoseWire& p);

struct Register {
  SessionMode mode = SessionMode::Classroom;
  bool operator==(const Register&) const = default;
};

struct Welcome {
  int user_id = 0;
  int total_users = 0;
  SessionMode mode = SessionMode::Classroom;
  bool operator==(const Welcome&) const = default;
};

struct Membership {
  int total_users = 0;
  std::vector<int> user_ids;
  bool operator==(const Membership&) const = default;
};

struct PoseUpdate {
  int user_id = 0;
  std::uint64_t seq = 0;
  PoseWire pose;
  bool operator==(const PoseUpdate&) const = default;
};

struct PeerPose {
  int user_id = 0;
  std::uint64_t seq = 0;
  PoseWire pose;
  bool operator==(const PeerPose&) const = default;
};

struct PlaneBoundary {
  int user_id = 0;
  std::vector<Vec2> vertices;
  bool operator==(const PlaneBoundary&) const = default;
};

struct Intersection {
  std::vector<Vec2> vertices;
  bool operator==(const Intersection&) const = default;
};

struct ErrorReply {
  std::string code;
  std::string text;
  bool operator==(const ErrorReply&) const = default;
};

using WireMessage =
    std::variant<Register, Welcome, Membership, PoseUpdate, PeerPose, PlaneBoundary, Intersection, ErrorReply>;

/// Wire tag of the message, e.g. "POSE_UPDATE".
std::string_view type_name(const WireMessage& msg);

/// Payload text without the length prefix.
std::string encode_payload(const WireMessage& msg);
/// Throws OversizeMessage when the payload exceeds 1 MiB.
std::vector<std::uint8_t> encode(const WireMessage& msg);

/// Parses one payload. Throws MalformedFrame, UnknownType or InvalidPose.
WireMessage decode_payload(std::string_view payload);
/// Decodes exactly one complete frame (no trailing bytes).
WireMessage decode(std::span<const std::uint8_t> frame);

/// Rejects POSE_UPDATE / PEER_POSE whose seq does not strictly increase per
/// sending user.
class SequenceGuard {
 public:
  /// Throws NonMonotonicSeq; the guard is left unchanged in that case.
  void check(const WireMessage& msg);
  void forget(int user_id);

 private:
  std::map<int, std::uint64_t> last_update_;
  std::map<int, std::uint64_t> last_peer_;
};

/// Incremental reader for one connection's byte stream.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);

  /// Next complete message, or nullopt when more bytes are needed. Throws
  /// MalformedFrame on a bad length prefix (the stream is then unusable) and
  /// NonMonotonicSeq after consuming a stale pose frame.
  std::optional<WireMessage> next();

  /// Bytes buffered but not yet forming a full frame.
  bool has_partial() const { return !buffer_.empty(); }

 private:
  std::vector<std::uint8_t> buffer_;
  SequenceGuard guard_;
};

/// Lowercase hex with 32 bytes per line, used by golden fixtures.
std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view text);

}  // namespace arcoord::protocol
