#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "arcoord/error.hpp"
#include "arcoord/protocol.hpp"
#include "oracles.hpp"

using namespace arcoord;
using namespace arcoord::protocol;

namespace {

const std::filesystem::path kGoldenDir = std::filesystem::path(ARCOORD_FIXTURE_DIR) / "protocol";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PoseWire pose_of(const RigidTransform& t) { return to_wire(t); }

// Fixed instances whose encodings are checked into the fixture directory.
std::vector<std::pair<std::string, WireMessage>> golden_messages() {
  const auto pose = pose_of(RigidTransform::translate(0.25, -1.5, 3.0) * RigidTransform::rot_y(90.0));
  return {
      {"register_classroom", Register{SessionMode::Classroom}},
      {"register_collaboration", Register{SessionMode::Collaboration}},
      {"welcome", Welcome{1, 2, SessionMode::Collaboration}},
      {"membership", Membership{3, {0, 2, 5}}},
      {"pose_update_identity", PoseUpdate{0, 1, PoseWire{}}},
      {"pose_update", PoseUpdate{4, 17, pose}},
      {"peer_pose", PeerPose{2, 900, pose}},
      {"plane_boundary", PlaneBoundary{1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}}},
      {"intersection", Intersection{{{0.5, 0.5}, {1, 0.5}, {1, 1}, {0.5, 1}}}},
      {"intersection_empty", Intersection{}},
      {"error", ErrorReply{"ModeMismatch", "session is in classroom mode"}},
  };
}

std::vector<std::uint8_t> frame_of(std::string_view payload) {
  std::vector<std::uint8_t> out{static_cast<std::uint8_t>(payload.size() >> 24),
                                static_cast<std::uint8_t>(payload.size() >> 16),
                                static_cast<std::uint8_t>(payload.size() >> 8),
                                static_cast<std::uint8_t>(payload.size())};
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

WireMessage random_message(std::mt19937_64& rng, int kind) {
  std::uniform_int_distribution<int> id(0, 1000);
  std::uniform_int_distribution<std::uint64_t> seq(1, std::uint64_t{1} << 53);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_int_distribution<int> count(0, 20);
  const auto mode = id(rng) % 2 == 0 ? SessionMode::Classroom : SessionMode::Collaboration;
  auto verts = [&] {
    std::vector<Vec2> v(static_cast<std::size_t>(count(rng)));
    for (auto& p : v) p = Vec2(u(rng), u(rng));
    return v;
  };
  switch (kind) {
    case 0: return Register{mode};
    case 1: return Welcome{id(rng), id(rng), mode};
    case 2: {
      Membership m;
      m.user_ids.resize(static_cast<std::size_t>(count(rng)));
      for (auto& x : m.user_ids) x = id(rng);
      m.total_users = static_cast<int>(m.user_ids.size());
      return m;
    }
    case 3: return PoseUpdate{id(rng), seq(rng), to_wire(oracle::random_pose(rng))};
    case 4: return PeerPose{id(rng), seq(rng), to_wire(oracle::random_pose(rng))};
    case 5: return PlaneBoundary{id(rng), verts()};
    case 6: return Intersection{verts()};
    default: {
      std::string text(static_cast<std::size_t>(count(rng)), 'a');
      for (auto& c : text) c = static_cast<char>(32 + id(rng) % 95);
      return ErrorReply{"code" + std::to_string(id(rng)), text + "\xc3\xa9"};
    }
  }
}

}  // namespace

TEST(Encode, RegisterRoundTrip) {
  const WireMessage m = Register{SessionMode::Classroom};
  EXPECT_EQ(decode(encode(m)), m);
}

TEST(Encode, IdentityPosePayload) {
  const std::string payload = encode_payload(PoseUpdate{0, 1, to_wire(RigidTransform::identity())});
  EXPECT_NE(payload.find("\"t\":[0.0,0.0,0.0]"), std::string::npos) << payload;
  EXPECT_NE(payload.find("\"q\":[1.0,0.0,0.0,0.0]"), std::string::npos) << payload;
  EXPECT_EQ(payload.rfind("{\"type\":\"POSE_UPDATE\"", 0), 0u) << payload;
}

TEST(Encode, BoundaryKeepsVertexOrderBitExact) {
  const PlaneBoundary b{3, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const auto back = std::get<PlaneBoundary>(decode(encode(b)));
  EXPECT_EQ(back, b);
}

TEST(Encode, HeaderIsBigEndianPayloadLength) {
  const auto bytes = encode(Register{});
  const std::size_t len = (std::size_t{bytes[0]} << 24) | (std::size_t{bytes[1]} << 16) |
                          (std::size_t{bytes[2]} << 8) | std::size_t{bytes[3]};
  EXPECT_EQ(len, bytes.size() - kHeaderBytes);
}

TEST(Encode, OversizeRejected) {
  Intersection big;
  big.vertices.assign(60000, Vec2(0.123456789012345, -0.987654321098765));
  EXPECT_EQ(code_of([&] { encode(big); }), ErrorCode::OversizeMessage);
}

TEST(RoundTrip, RandomizedInstancesOfEveryType) {
  std::mt19937_64 rng(77);
  for (int kind = 0; kind < 8; ++kind) {
    for (int i = 0; i < 200; ++i) {
      const WireMessage m = random_message(rng, kind);
      ASSERT_EQ(decode(encode(m)), m) << encode_payload(m);
    }
  }
}

TEST(Pose, WireConversionRoundTrips) {
  std::mt19937_64 rng(78);
  for (int i = 0; i < 200; ++i) {
    const auto t = oracle::random_pose(rng);
    const auto w = to_wire(t);
    EXPECT_GE(w.rotation[0], 0.0);
    EXPECT_LE(max_abs_difference(from_wire(w), t), 1e-12);
  }
}

TEST(Pose, NegativeScalarIsCanonicalized) {
  const std::string payload =
      R"({"type":"POSE_UPDATE","user_id":0,"seq":1,"pose":{"t":[0,0,0],"q":[-1,0,0,0]}})";
  const auto m = std::get<PoseUpdate>(decode_payload(payload));
  EXPECT_EQ(m.pose.rotation[0], 1.0);
}

TEST(Golden, EncodingsMatchCheckedInBytes) {
  const bool regenerate = std::getenv("ARCOORD_WRITE_GOLDEN") != nullptr;
  for (const auto& [name, msg] : golden_messages()) {
    const auto path = kGoldenDir / (name + ".hex");
    const std::string hex = to_hex(encode(msg));
    if (regenerate) {
      std::ofstream(path) << hex;
      continue;
    }
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(read_file(path), hex) << name;
    EXPECT_EQ(decode(from_hex(read_file(path))), msg) << name;
  }
}

TEST(Golden, MalformedCorpusRejected) {
  // File names are <case>.<ErrorCode>.hex.
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kGoldenDir / "malformed")) {
    const std::string stem = entry.path().stem().string();
    const std::string expected = stem.substr(stem.find('.') + 1);
    const auto bytes = from_hex(read_file(entry.path()));
    try {
      decode(bytes);
      ADD_FAILURE() << stem << " was accepted";
    } catch (const Error& e) {
      EXPECT_EQ(std::string(to_string(e.code())), expected) << stem << ": " << e.what();
    }
    ++seen;
  }
  EXPECT_GE(seen, 8);
}

TEST(Decode, Truncated) {
  auto bytes = encode(Welcome{0, 1, SessionMode::Classroom});
  bytes.pop_back();
  EXPECT_EQ(code_of([&] { decode(bytes); }), ErrorCode::MalformedFrame);
  const std::vector<std::uint8_t> header_only{0, 0};
  EXPECT_EQ(code_of([&] { decode(header_only); }), ErrorCode::MalformedFrame);
}

TEST(Decode, HalfNormQuaternion) {
  const auto bytes = frame_of(R"({"type":"PEER_POSE","user_id":0,"seq":1,"pose":{"t":[0,0,0],"q":[0.5,0,0,0]}})");
  EXPECT_EQ(code_of([&] { decode(bytes); }), ErrorCode::InvalidPose);
}

TEST(Decode, UnknownTypeAndBadJson) {
  EXPECT_EQ(code_of([] { decode(frame_of(R"({"type":"HELLO"})")); }), ErrorCode::UnknownType);
  EXPECT_EQ(code_of([] { decode(frame_of(R"({"type":"REGISTER")")); }), ErrorCode::MalformedFrame);
  EXPECT_EQ(code_of([] { decode(frame_of(R"({"type":"REGISTER","mode":"lecture"})")); }), ErrorCode::MalformedFrame);
  EXPECT_EQ(code_of([] { decode(frame_of(R"({"type":"WELCOME","user_id":"x"})")); }), ErrorCode::MalformedFrame);
}

TEST(SequenceGuard, RejectsRegression) {
  SequenceGuard g;
  g.check(PoseUpdate{1, 5, {}});
  EXPECT_EQ(code_of([&] { g.check(PoseUpdate{1, 3, {}}); }), ErrorCode::NonMonotonicSeq);
  EXPECT_EQ(code_of([&] { g.check(PoseUpdate{1, 5, {}}); }), ErrorCode::NonMonotonicSeq);
  g.check(PoseUpdate{1, 6, {}});
  g.check(PoseUpdate{2, 1, {}});  // other sender
  g.check(PeerPose{1, 1, {}});    // other direction
  g.forget(1);
  g.check(PoseUpdate{1, 1, {}});
}

TEST(FrameReader, ReassemblesByteByByte) {
  std::vector<std::uint8_t> stream;
  const std::vector<WireMessage> msgs{Register{}, PoseUpdate{0, 1, {}}, PoseUpdate{0, 2, {}}, Intersection{}};
  for (const auto& m : msgs) {
    const auto f = encode(m);
    stream.insert(stream.end(), f.begin(), f.end());
  }
  FrameReader r;
  std::vector<WireMessage> got;
  for (std::uint8_t b : stream) {
    r.feed(std::span(&b, 1));
    while (auto m = r.next()) got.push_back(*m);
  }
  EXPECT_EQ(got, msgs);
  EXPECT_FALSE(r.has_partial());
}

TEST(FrameReader, StaleSeqConsumedThenContinues) {
  FrameReader r;
  for (const WireMessage& m : std::vector<WireMessage>{PoseUpdate{0, 5, {}}, PoseUpdate{0, 3, {}}, PoseUpdate{0, 6, {}}}) {
    const auto f = encode(m);
    r.feed(f);
  }
  EXPECT_TRUE(r.next().has_value());
  EXPECT_EQ(code_of([&] { r.next(); }), ErrorCode::NonMonotonicSeq);
  const auto m = r.next();
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(std::get<PoseUpdate>(*m).seq, 6u);
}

TEST(FrameReader, OversizeLengthPrefix) {
  FrameReader r;
  const std::vector<std::uint8_t> header{0x00, 0x10, 0x00, 0x01};
  r.feed(header);
  EXPECT_EQ(code_of([&] { r.next(); }), ErrorCode::MalformedFrame);
}

TEST(Hex, RoundTrip) {
  std::vector<std::uint8_t> bytes(100);
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<std::uint8_t>(i * 37);
  EXPECT_EQ(from_hex(to_hex(bytes)), bytes);
}
