#include "arcoord/protocol.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "arcoord/error.hpp"

namespace arcoord::protocol {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedFrame, what); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

json pose_to_json(const PoseWire& p) {
  return json{{"t", p.translation}, {"q", p.rotation}};
}

json vertices_to_json(const std::vector<Vec2>& vs) {
  json arr = json::array();
  for (const auto& v : vs) arr.push_back(json::array({v.x(), v.y()}));
  return arr;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

int get_int(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) malformed(std::string("field '") + key + "' must be an integer");
  const auto value = v.get<std::int64_t>();
  if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
    malformed(std::string("field '") + key + "' out of range");
  }
  return static_cast<int>(value);
}

std::uint64_t get_seq(const json& j) {
  const json& v = field(j, "seq");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    malformed("field 'seq' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double get_number(const json& v, const char* what) {
  if (!v.is_number()) malformed(std::string(what) + " must be a number");
  return v.get<double>();
}

SessionMode get_mode(const json& j) {
  const json& v = field(j, "mode");
  if (!v.is_string()) malformed("field 'mode' must be a string");
  auto mode = parse_session_mode(v.get<std::string>());
  if (!mode) malformed("unknown session mode '" + v.get<std::string>() + "'");
  return *mode;
}

PoseWire get_pose(const json& j) {
  const json& p = field(j, "pose");
  if (!p.is_object()) malformed("field 'pose' must be an object");
  const json& t = field(p, "t");
  const json& q = field(p, "q");
  if (!t.is_array() || t.size() != 3) malformed("pose translation must have 3 components");
  if (!q.is_array() || q.size() != 4) malformed("pose quaternion must have 4 components");

  PoseWire out;
  for (std::size_t i = 0; i < 3; ++i) out.translation[i] = get_number(t[i], "translation component");
  for (std::size_t i = 0; i < 4; ++i) out.rotation[i] = get_number(q[i], "quaternion component");

  for (double v : out.translation) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidPose, "translation is not finite");
  }
  const auto& r = out.rotation;
  const double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3]);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kQuaternionTolerance) {
    throw Error(ErrorCode::InvalidPose, "quaternion norm " + std::to_string(norm) + " is not unit");
  }
  // Renormalize only when the defect is above rounding noise so well-formed
  // poses are relayed bit-for-bit.
  if (std::abs(norm - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
    for (double& c : out.rotation) c /= norm;
  }
  if (out.rotation[0] < 0.0) {
    for (double& c : out.rotation) c = -c;
  }
  return out;
}

std::vector<Vec2> get_vertices(const json& j) {
  const json& arr = field(j, "vertices");
  if (!arr.is_array()) malformed("field 'vertices' must be an array");
  std::vector<Vec2> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_array() || v.size() != 2) malformed("vertex must be an [x, z] pair");
    const double x = get_number(v[0], "vertex x");
    const double z = get_number(v[1], "vertex z");
    if (!std::isfinite(x) || !std::isfinite(z)) malformed("vertex is not finite");
    out.emplace_back(x, z);
  }
  return out;
}

std::string get_string(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::uint32_t read_length(std::span<const std::uint8_t> bytes) {
  return (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) | (std::uint32_t{bytes[2]} << 8) |
         std::uint32_t{bytes[3]};
}

}  // namespace

PoseWire to_wire(const RigidTransform& t) {
  const Eigen::Quaterniond q = t.quaternion();
  PoseWire p;
  p.translation = {t.translation.x(), t.translation.y(), t.translation.z()};
  p.rotation = {q.w(), q.x(), q.y(), q.z()};
  return p;
}

RigidTransform from_wire(const PoseWire& p) {
  const Eigen::Quaterniond q(p.rotation[0], p.rotation[1], p.rotation[2], p.rotation[3]);
  return RigidTransform::from_quaternion(q, {p.translation[0], p.translation[1], p.translation[2]});
}

std::string_view type_name(const WireMessage& msg) {
  return std::visit(overloaded{
                        [](const Register&) { return std::string_view("REGISTER"); },
                        [](const Welcome&) { return std::string_view("WELCOME"); },
                        [](const Membership&) { return std::string_view("MEMBERSHIP"); },
                        [](const PoseUpdate&) { return std::string_view("POSE_UPDATE"); },
                        [](const PeerPose&) { return std::string_view("PEER_POSE"); },
                        [](const PlaneBoundary&) { return std::string_view("PLANE_BOUNDARY"); },
                        [](const Intersection&) { return std::string_view("INTERSECTION"); },
                        [](const ErrorReply&) { return std::string_view("ERROR"); },
                    },
                    msg);
}

std::string encode_payload(const WireMessage& msg) {
  json j;
  j["type"] = std::string(type_name(msg));
  std::visit(overloaded{
                 [&](const Register& m) { j["mode"] = std::string(to_string(m.mode)); },
                 [&](const Welcome& m) {
                   j["user_id"] = m.user_id;
                   j["total_users"] = m.total_users;
                   j["mode"] = std::string(to_string(m.mode));
                 },
                 [&](const Membership& m) {
                   j["total_users"] = m.total_users;
                   j["user_ids"] = m.user_ids;
                 },
                 [&](const PoseUpdate& m) {
                   j["user_id"] = m.user_id;
                   j["seq"] = m.seq;
                   j["pose"] = pose_to_json(m.pose);
                 },
                 [&](const PeerPose& m) {
                   j["user_id"] = m.user_id;
                   j["seq"] = m.seq;
                   j["pose"] = pose_to_json(m.pose);
                 },
                 [&](const PlaneBoundary& m) {
                   j["user_id"] = m.user_id;
                   j["vertices"] = vertices_to_json(m.vertices);
                 },
                 [&](const Intersection& m) { j["vertices"] = vertices_to_json(m.vertices); },
                 [&](const ErrorReply& m) {
                   j["code"] = m.code;
                   j["text"] = m.text;
                 },
             },
             msg);
  return j.dump();
}

std::vector<std::uint8_t> encode(const WireMessage& msg) {
  const std::string payload = encode_payload(msg);
  if (payload.size() > kMaxPayloadBytes) {
    throw Error(ErrorCode::OversizeMessage, "payload of " + std::to_string(payload.size()) + " bytes exceeds 1 MiB");
  }
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + payload.size());
  out.push_back(static_cast<std::uint8_t>(n >> 24));
  out.push_back(static_cast<std::uint8_t>(n >> 16));
  out.push_back(static_cast<std::uint8_t>(n >> 8));
  out.push_back(static_cast<std::uint8_t>(n));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

WireMessage decode_payload(std::string_view payload) {
  json j = json::parse(payload, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) malformed("payload is not valid JSON");
  if (!j.is_object()) malformed("payload must be a JSON object");

  const std::string type = get_string(j, "type");
  if (type == "REGISTER") return Register{get_mode(j)};
  if (type == "WELCOME") return Welcome{get_int(j, "user_id"), get_int(j, "total_users"), get_mode(j)};
  if (type == "MEMBERSHIP") {
    Membership m;
    m.total_users = get_int(j, "total_users");
    const json& ids = field(j, "user_ids");
    if (!ids.is_array()) malformed("field 'user_ids' must be an array");
    for (const auto& id : ids) {
      if (!id.is_number_integer()) malformed("user id must be an integer");
      m.user_ids.push_back(id.get<int>());
    }
    return m;
  }
  if (type == "POSE_UPDATE") return PoseUpdate{get_int(j, "user_id"), get_seq(j), get_pose(j)};
  if (type == "PEER_POSE") return PeerPose{get_int(j, "user_id"), get_seq(j), get_pose(j)};
  if (type == "PLANE_BOUNDARY") return PlaneBoundary{get_int(j, "user_id"), get_vertices(j)};
  if (type == "INTERSECTION") return Intersection{get_vertices(j)};
  if (type == "ERROR") return ErrorReply{get_string(j, "code"), get_string(j, "text")};
  throw Error(ErrorCode::UnknownType, "unknown message type '" + type + "'");
}

WireMessage decode(std::span<const std::uint8_t> frame) {
  if (frame.size() < kHeaderBytes) malformed("frame shorter than its length prefix");
  const std::uint32_t n = read_length(frame);
  if (n > kMaxPayloadBytes) malformed("length prefix exceeds 1 MiB");
  if (frame.size() - kHeaderBytes != n) {
    malformed("length prefix says " + std::to_string(n) + " bytes, frame holds " +
              std::to_string(frame.size() - kHeaderBytes));
  }
  const auto* data = reinterpret_cast<const char*>(frame.data() + kHeaderBytes);
  return decode_payload(std::string_view(data, n));
}

void SequenceGuard::check(const WireMessage& msg) {
  auto apply = [](std::map<int, std::uint64_t>& last, int user, std::uint64_t seq) {
    auto it = last.find(user);
    if (it != last.end() && seq <= it->second) {
      throw Error(ErrorCode::NonMonotonicSeq, "seq " + std::to_string(seq) + " after " + std::to_string(it->second) +
                                                  " from user " + std::to_string(user));
    }
    last[user] = seq;
  };
  if (const auto* m = std::get_if<PoseUpdate>(&msg)) apply(last_update_, m->user_id, m->seq);
  if (const auto* m = std::get_if<PeerPose>(&msg)) apply(last_peer_, m->user_id, m->seq);
}

void SequenceGuard::forget(int user_id) {
  last_update_.erase(user_id);
  last_peer_.erase(user_id);
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) { buffer_.insert(buffer_.end(), bytes.begin(), bytes.end()); }

std::optional<WireMessage> FrameReader::next() {
  if (buffer_.size() < kHeaderBytes) return std::nullopt;
  const std::uint32_t n = read_length(buffer_);
  if (n > kMaxPayloadBytes) malformed("length prefix exceeds 1 MiB");
  if (buffer_.size() < kHeaderBytes + n) return std::nullopt;

  const auto* data = reinterpret_cast<const char*>(buffer_.data() + kHeaderBytes);
  const std::string payload(data, n);
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(kHeaderBytes + n));

  WireMessage msg = decode_payload(payload);
  guard_.check(msg);
  return msg;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out.push_back(digits[bytes[i] >> 4]);
    out.push_back(digits[bytes[i] & 0xF]);
    if (i % 32 == 31 || i + 1 == bytes.size()) out.push_back('\n');
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view text) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  int high = -1;
  for (char c : text) {
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
    const int v = nibble(c);
    if (v < 0) throw Error(ErrorCode::InvalidArgument, "invalid hex digit");
    if (high < 0) {
      high = v;
    } else {
      out.push_back(static_cast<std::uint8_t>(high << 4 | v));
      high = -1;
    }
  }
  if (high >= 0) throw Error(ErrorCode::InvalidArgument, "odd number of hex digits");
  return out;
}

}  // namespace arcoord::protocol
