#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

#include "arcoord/coordination.hpp"
#include "arcoord/polygon.hpp"
#include "arcoord/protocol.hpp"
#include "arcoord/socket.hpp"

namespace arcoord {

using ConnectionId = std::uint64_t;

/// A message the session wants delivered to one connection.
struct Outgoing {
  ConnectionId to = 0;
  protocol::WireMessage msg;
};

struct UserRecord {
  ConnectionId connection = 0;
  std::optional<protocol::PoseWire> last_pose;
  std::optional<std::uint64_t> last_seq;
  std::optional<Polygon2> boundary;
};

struct SessionCounters {
  std::uint64_t joins = 0;
  std::uint64_t leaves = 0;
  std::uint64_t poses_accepted = 0;
  std::uint64_t poses_relayed = 0;  // individual PEER_POSE deliveries
  std::uint64_t poses_dropped = 0;  // stale seq
};

/// Membership, relay and shared-plane logic of one session. Not thread safe:
/// the owner serializes all calls.
class SessionState {
 public:
  /// Without a fixed mode the first joiner picks it; it resets once the
  /// session empties.
  explicit SessionState(std::optional<SessionMode> mode = std::nullopt);

  /// WELCOME to the joiner, MEMBERSHIP to everyone, and the current
  /// intersection to the joiner when one exists. Throws ModeMismatch, or
  /// InvalidArgument if the connection already registered.
  std::vector<Outgoing> handle_register(ConnectionId connection, const protocol::Register& msg);

  /// PEER_POSE to every other user. A stale seq is dropped and counted.
  /// Throws UnknownUser when the connection does not own msg.user_id.
  std::vector<Outgoing> handle_pose_update(ConnectionId connection, const protocol::PoseUpdate& msg);

  /// Re-hulls and stores the boundary, then broadcasts the new intersection.
  /// Throws UnknownUser or DegenerateBoundary.
  std::vector<Outgoing> handle_plane_boundary(ConnectionId connection, const protocol::PlaneBoundary& msg);

  /// Removes the user, broadcasts MEMBERSHIP and, if the user had a
  /// boundary, the recomputed intersection.
  std::vector<Outgoing> handle_disconnect(int user_id);

  /// Counts a pose that the frame reader rejected as stale.
  void record_stale_drop() { ++counters_.poses_dropped; }

  std::optional<SessionMode> mode() const { return mode_; }
  const std::map<int, UserRecord>& users() const { return users_; }
  std::optional<int> user_for(ConnectionId connection) const;
  const std::optional<Polygon2>& current_intersection() const { return intersection_; }
  const SessionCounters& counters() const { return counters_; }
  std::vector<int> user_ids() const;

 private:
  protocol::Membership membership() const;
  void recompute_intersection();
  protocol::Intersection intersection_message() const;
  const UserRecord& require_owner(ConnectionId connection, int user_id) const;

  std::optional<SessionMode> fixed_mode_;
  std::optional<SessionMode> mode_;
  std::map<int, UserRecord> users_;
  int next_id_ = 0;
  std::optional<Polygon2> intersection_;
  SessionCounters counters_;
};

struct ServerOptions {
  net::Endpoint bind{"127.0.0.1", 7400};
  std::optional<SessionMode> mode;
  std::size_t queue_depth = 64;
  /// Line-oriented event log (join/leave/drop); null disables it.
  std::ostream* log = nullptr;
};

struct ServerStats {
  SessionCounters session;
  std::uint64_t overflow_disconnects = 0;
  std::uint64_t protocol_errors = 0;
  std::size_t connected = 0;
};

/// TCP coordination server. Each connection gets a reader thread that feeds
/// the shared SessionState under one mutex, and a writer thread draining a
/// bounded queue; a client whose queue overflows is disconnected.
class CoordinationServer {
 public:
  explicit CoordinationServer(ServerOptions options);
  ~CoordinationServer();
  CoordinationServer(const CoordinationServer&) = delete;
  CoordinationServer& operator=(const CoordinationServer&) = delete;

  /// Binds and starts accepting; returns the bound port.
  std::uint16_t start();
  void stop();

  net::Endpoint endpoint() const;
  ServerStats stats() const;
  /// Snapshot of the session's current intersection.
  std::optional<Polygon2> current_intersection() const;

 private:
  struct Connection;

  void accept_loop();
  void read_loop(const std::shared_ptr<Connection>& conn);
  void write_loop(const std::shared_ptr<Connection>& conn);
  void dispatch(const std::vector<Outgoing>& out);
  void send_error(const std::shared_ptr<Connection>& conn, const std::string& code, const std::string& text);
  void drop_connection(const std::shared_ptr<Connection>& conn);
  void reap_finished();
  void log_line(const std::string& line);

  ServerOptions options_;
  net::Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;

  mutable std::mutex mutex_;  // guards session_, connections_, counters below
  SessionState session_;
  std::map<ConnectionId, std::shared_ptr<Connection>> connections_;
  std::vector<std::shared_ptr<Connection>> finished_;
  ConnectionId next_connection_ = 1;
  std::uint64_t overflow_disconnects_ = 0;
  std::uint64_t protocol_errors_ = 0;
};

}  // namespace arcoord
