#include <gtest/gtest.h>

#include <chrono>
#include <set>
#include <sstream>
#include <thread>

#include "arcoord/error.hpp"
#include "arcoord/server.hpp"

using namespace arcoord;
using namespace arcoord::protocol;
using namespace std::chrono_literals;

namespace {

Polygon2 square(double x0, double z0, double side = 1.0) {
  return Polygon2({{x0, z0}, {x0 + side, z0}, {x0 + side, z0 + side}, {x0, z0 + side}});
}

template <class T>
std::vector<std::pair<ConnectionId, T>> of_type(const std::vector<Outgoing>& out) {
  std::vector<std::pair<ConnectionId, T>> r;
  for (const auto& o : out) {
    if (const auto* m = std::get_if<T>(&o.msg)) r.emplace_back(o.to, *m);
  }
  return r;
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

}  // namespace

TEST(SessionState, FirstJoinerGetsIdZero) {
  SessionState s;
  const auto out = s.handle_register(10, Register{SessionMode::Classroom});
  const auto w = of_type<Welcome>(out);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].first, 10u);
  EXPECT_EQ(w[0].second, (Welcome{0, 1, SessionMode::Classroom}));
}

TEST(SessionState, SecondJoinerBroadcastsMembership) {
  SessionState s;
  s.handle_register(10, Register{});
  const auto out = s.handle_register(11, Register{});
  const auto m = of_type<Membership>(out);
  ASSERT_EQ(m.size(), 2u);
  for (const auto& [to, msg] : m) EXPECT_EQ(msg, (Membership{2, {0, 1}}));
  EXPECT_EQ(s.user_ids(), (std::vector<int>{0, 1}));
}

TEST(SessionState, ModeMismatchRejected) {
  SessionState s;
  s.handle_register(10, Register{SessionMode::Classroom});
  EXPECT_EQ(code_of([&] { s.handle_register(11, Register{SessionMode::Collaboration}); }), ErrorCode::ModeMismatch);
  SessionState fixed(SessionMode::Collaboration);
  EXPECT_EQ(code_of([&] { fixed.handle_register(1, Register{SessionMode::Classroom}); }), ErrorCode::ModeMismatch);
}

TEST(SessionState, ModeResetsWhenSessionEmpties) {
  SessionState s;
  s.handle_register(10, Register{SessionMode::Classroom});
  s.handle_disconnect(0);
  EXPECT_NO_THROW(s.handle_register(11, Register{SessionMode::Collaboration}));
}

TEST(SessionState, PoseRelayedToEveryOtherUser) {
  SessionState s;
  s.handle_register(10, Register{});
  s.handle_register(11, Register{});
  s.handle_register(12, Register{});
  const PoseUpdate pu{0, 1, PoseWire{{1, 2, 3}, {1, 0, 0, 0}}};
  const auto out = s.handle_pose_update(10, pu);
  const auto peers = of_type<PeerPose>(out);
  ASSERT_EQ(peers.size(), 2u);
  std::set<ConnectionId> to;
  for (const auto& [c, m] : peers) {
    to.insert(c);
    EXPECT_EQ(m, (PeerPose{0, 1, pu.pose}));
  }
  EXPECT_EQ(to, (std::set<ConnectionId>{11, 12}));
  EXPECT_EQ(s.counters().poses_relayed, 2u);
}

TEST(SessionState, StalePoseDroppedAndCounted) {
  SessionState s;
  s.handle_register(10, Register{});
  s.handle_register(11, Register{});
  s.handle_pose_update(10, PoseUpdate{0, 5, {}});
  EXPECT_TRUE(s.handle_pose_update(10, PoseUpdate{0, 3, {}}).empty());
  EXPECT_EQ(s.counters().poses_dropped, 1u);
  EXPECT_EQ(s.counters().poses_accepted, 1u);
}

TEST(SessionState, PoseForAnotherUserRejected) {
  SessionState s;
  s.handle_register(10, Register{});
  s.handle_register(11, Register{});
  EXPECT_EQ(code_of([&] { s.handle_pose_update(10, PoseUpdate{1, 1, {}}); }), ErrorCode::UnknownUser);
  EXPECT_EQ(code_of([&] { s.handle_pose_update(99, PoseUpdate{0, 1, {}}); }), ErrorCode::UnknownUser);
}

TEST(SessionState, SingleBoundaryIsTheIntersection) {
  SessionState s;
  s.handle_register(10, Register{});
  const auto out = s.handle_plane_boundary(10, PlaneBoundary{0, square(0, 0).vertices()});
  const auto i = of_type<Intersection>(out);
  ASSERT_EQ(i.size(), 1u);
  EXPECT_EQ(Polygon2(i[0].second.vertices), square(0, 0));
  EXPECT_EQ(s.current_intersection(), square(0, 0));
}

TEST(SessionState, OverlappingBoundaries) {
  SessionState s;
  s.handle_register(10, Register{});
  s.handle_register(11, Register{});
  s.handle_plane_boundary(10, PlaneBoundary{0, square(0, 0).vertices()});
  const auto out = s.handle_plane_boundary(11, PlaneBoundary{1, square(0.5, 0.5).vertices()});
  const auto i = of_type<Intersection>(out);
  ASSERT_EQ(i.size(), 2u);
  EXPECT_NEAR(area(Polygon2(i[0].second.vertices)), 0.25, 1e-15);
}

TEST(SessionState, DisjointBoundaryBroadcastsEmpty) {
  SessionState s;
  s.handle_register(10, Register{});
  s.handle_register(11, Register{});
  s.handle_plane_boundary(10, PlaneBoundary{0, square(0, 0).vertices()});
  const auto out = s.handle_plane_boundary(11, PlaneBoundary{1, square(5, 5).vertices()});
  const auto i = of_type<Intersection>(out);
  ASSERT_EQ(i.size(), 2u);
  EXPECT_TRUE(i[0].second.vertices.empty());
  ASSERT_TRUE(s.current_intersection().has_value());
  EXPECT_TRUE(s.current_intersection()->empty());
}

TEST(SessionState, BoundaryIsRehulledAndDegenerateRejected) {
  SessionState s;
  s.handle_register(10, Register{});
  const std::vector<Vec2> messy{{1, 1}, {0, 0}, {0.5, 0.5}, {1, 0}, {0, 1}};
  s.handle_plane_boundary(10, PlaneBoundary{0, messy});
  EXPECT_EQ(s.current_intersection(), square(0, 0));
  EXPECT_EQ(code_of([&] { s.handle_plane_boundary(10, PlaneBoundary{0, {{0, 0}, {1, 1}, {2, 2}}}); }),
            ErrorCode::DegenerateBoundary);
}

TEST(SessionState, JoinerReceivesCurrentIntersection) {
  SessionState s;
  s.handle_register(10, Register{});
  s.handle_plane_boundary(10, PlaneBoundary{0, square(0, 0).vertices()});
  const auto out = s.handle_register(11, Register{});
  const auto i = of_type<Intersection>(out);
  ASSERT_EQ(i.size(), 1u);
  EXPECT_EQ(i[0].first, 11u);
}

TEST(SessionState, DisconnectUpdatesMembershipAndIntersection) {
  SessionState s;
  s.handle_register(10, Register{});
  s.handle_register(11, Register{});
  s.handle_plane_boundary(10, PlaneBoundary{0, square(0, 0, 2).vertices()});
  s.handle_plane_boundary(11, PlaneBoundary{1, square(0.5, 0.5, 0.5).vertices()});
  const double before = area(*s.current_intersection());
  const auto out = s.handle_disconnect(1);
  const auto m = of_type<Membership>(out);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].second, (Membership{1, {0}}));
  EXPECT_GE(area(*s.current_intersection()), before);
  s.handle_disconnect(0);
  EXPECT_FALSE(s.current_intersection().has_value());
  EXPECT_TRUE(s.users().empty());
}

TEST(SessionState, IdsAreNotReused) {
  SessionState s;
  s.handle_register(10, Register{});
  s.handle_register(11, Register{});
  s.handle_disconnect(0);
  const auto w = of_type<Welcome>(s.handle_register(12, Register{}));
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].second.user_id, 2);
  EXPECT_EQ(w[0].second.total_users, 2);
}

// Live server over loopback.

namespace {

struct LiveClient {
  net::MessageConnection conn;
  int id = -1;

  explicit LiveClient(const net::Endpoint& ep) : conn(net::connect_tcp(ep)) {}

  template <class T>
  T expect(std::chrono::milliseconds timeout = 2000ms) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
      auto m = conn.receive(100ms);
      if (!m) continue;
      if (auto* t = std::get_if<T>(&*m)) return *t;
    }
    throw std::runtime_error("timed out waiting for message");
  }

  void join(SessionMode mode = SessionMode::Classroom) {
    conn.send(Register{mode});
    id = expect<Welcome>().user_id;
  }
};

}  // namespace

TEST(CoordinationServer, RelaysPosesOverLoopback) {
  std::ostringstream log;
  CoordinationServer server({{"127.0.0.1", 0}, std::nullopt, 64, &log});
  const auto port = server.start();
  const net::Endpoint ep{"127.0.0.1", port};

  LiveClient a(ep), b(ep);
  a.join();
  b.join();
  a.conn.send(PoseUpdate{a.id, 1, PoseWire{{1, 2, 3}, {1, 0, 0, 0}}});
  const auto p = b.expect<PeerPose>();
  EXPECT_EQ(p.user_id, a.id);
  EXPECT_EQ(p.seq, 1u);
  EXPECT_EQ(p.pose.translation, (std::array<double, 3>{1, 2, 3}));
  server.stop();
  EXPECT_NE(log.str().find("event=join"), std::string::npos);
}

TEST(CoordinationServer, ModeMismatchGetsErrorReply) {
  CoordinationServer server({{"127.0.0.1", 0}, SessionMode::Classroom, 64, nullptr});
  const net::Endpoint ep{"127.0.0.1", server.start()};
  LiveClient a(ep);
  a.conn.send(Register{SessionMode::Collaboration});
  const auto e = a.expect<ErrorReply>();
  EXPECT_EQ(e.code, "ModeMismatch");
  server.stop();
}

TEST(CoordinationServer, DisconnectBroadcastsMembership) {
  CoordinationServer server({{"127.0.0.1", 0}, std::nullopt, 64, nullptr});
  const net::Endpoint ep{"127.0.0.1", server.start()};
  LiveClient a(ep);
  a.join();
  {
    LiveClient b(ep);
    b.join();
    EXPECT_EQ(a.expect<Membership>().total_users, 1);  // a's own join
    EXPECT_EQ(a.expect<Membership>().total_users, 2);
  }
  EXPECT_EQ(a.expect<Membership>().total_users, 1);
  server.stop();
  EXPECT_GE(server.stats().session.leaves, 1u);
}

TEST(CoordinationServer, GarbageClosesOnlyThatConnection) {
  CoordinationServer server({{"127.0.0.1", 0}, std::nullopt, 64, nullptr});
  const net::Endpoint ep{"127.0.0.1", server.start()};
  LiveClient a(ep);
  a.join();
  auto raw = net::connect_tcp(ep);
  const std::vector<std::uint8_t> junk{0, 0, 0, 3, 'a', 'b', 'c'};
  net::send_all(raw, junk);
  std::this_thread::sleep_for(200ms);
  LiveClient b(ep);
  b.join();
  a.conn.send(PoseUpdate{a.id, 1, {}});
  EXPECT_EQ(b.expect<PeerPose>().user_id, a.id);
  server.stop();
  EXPECT_GE(server.stats().protocol_errors, 1u);
}
