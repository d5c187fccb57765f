#include "arcoord/server.hpp"

#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <sstream>

#include "arcoord/error.hpp"

namespace arcoord {

namespace {

std::vector<Vec2> vertices_of(const std::optional<Polygon2>& p) {
  return p ? p->vertices() : std::vector<Vec2>{};
}

}  // namespace

// ---------------------------------------------------------------------------
// SessionState

SessionState::SessionState(std::optional<SessionMode> mode) : fixed_mode_(mode), mode_(mode) {}

std::optional<int> SessionState::user_for(ConnectionId connection) const {
  for (const auto& [id, rec] : users_) {
    if (rec.connection == connection) return id;
  }
  return std::nullopt;
}

std::vector<int> SessionState::user_ids() const {
  std::vector<int> ids;
  ids.reserve(users_.size());
  for (const auto& [id, rec] : users_) ids.push_back(id);
  return ids;
}

protocol::Membership SessionState::membership() const {
  return {static_cast<int>(users_.size()), user_ids()};
}

protocol::Intersection SessionState::intersection_message() const { return {vertices_of(intersection_)}; }

void SessionState::recompute_intersection() {
  std::vector<Polygon2> boundaries;
  for (const auto& [id, rec] : users_) {
    if (rec.boundary) boundaries.push_back(*rec.boundary);
  }
  if (boundaries.empty()) {
    intersection_.reset();
  } else {
    intersection_ = intersect_all(boundaries);
  }
}

const UserRecord& SessionState::require_owner(ConnectionId connection, int user_id) const {
  auto it = users_.find(user_id);
  if (it == users_.end() || it->second.connection != connection) {
    throw Error(ErrorCode::UnknownUser, "connection does not own user " + std::to_string(user_id));
  }
  return it->second;
}

std::vector<Outgoing> SessionState::handle_register(ConnectionId connection, const protocol::Register& msg) {
  if (user_for(connection)) throw Error(ErrorCode::InvalidArgument, "connection already registered");
  if (mode_ && *mode_ != msg.mode) {
    throw Error(ErrorCode::ModeMismatch, "session runs in " + std::string(to_string(*mode_)) + " mode");
  }
  mode_ = msg.mode;

  const int id = next_id_++;
  users_[id] = UserRecord{connection, std::nullopt, std::nullopt, std::nullopt};
  ++counters_.joins;

  std::vector<Outgoing> out;
  out.push_back({connection, protocol::Welcome{id, static_cast<int>(users_.size()), *mode_}});
  const protocol::Membership m = membership();
  for (const auto& [uid, rec] : users_) out.push_back({rec.connection, m});
  if (intersection_) out.push_back({connection, intersection_message()});
  return out;
}

std::vector<Outgoing> SessionState::handle_pose_update(ConnectionId connection, const protocol::PoseUpdate& msg) {
  require_owner(connection, msg.user_id);
  UserRecord& rec = users_.at(msg.user_id);
  if (rec.last_seq && msg.seq <= *rec.last_seq) {
    ++counters_.poses_dropped;
    return {};
  }
  rec.last_seq = msg.seq;
  rec.last_pose = msg.pose;
  ++counters_.poses_accepted;

  std::vector<Outgoing> out;
  const protocol::PeerPose relay{msg.user_id, msg.seq, msg.pose};
  for (const auto& [uid, other] : users_) {
    if (uid == msg.user_id) continue;
    out.push_back({other.connection, relay});
  }
  counters_.poses_relayed += out.size();
  return out;
}

std::vector<Outgoing> SessionState::handle_plane_boundary(ConnectionId connection,
                                                          const protocol::PlaneBoundary& msg) {
  require_owner(connection, msg.user_id);
  Polygon2 hull;
  try {
    hull = convex_hull(msg.vertices);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateInput) throw Error(ErrorCode::DegenerateBoundary, e.what());
    throw;
  }
  users_.at(msg.user_id).boundary = std::move(hull);
  recompute_intersection();

  std::vector<Outgoing> out;
  const protocol::Intersection inter = intersection_message();
  for (const auto& [uid, rec] : users_) out.push_back({rec.connection, inter});
  return out;
}

std::vector<Outgoing> SessionState::handle_disconnect(int user_id) {
  auto it = users_.find(user_id);
  if (it == users_.end()) return {};
  const bool had_boundary = it->second.boundary.has_value();
  users_.erase(it);
  ++counters_.leaves;
  recompute_intersection();
  if (users_.empty() && !fixed_mode_) mode_.reset();

  std::vector<Outgoing> out;
  const protocol::Membership m = membership();
  for (const auto& [uid, rec] : users_) out.push_back({rec.connection, m});
  if (had_boundary) {
    const protocol::Intersection inter = intersection_message();
    for (const auto& [uid, rec] : users_) out.push_back({rec.connection, inter});
  }
  return out;
}

// ---------------------------------------------------------------------------
// CoordinationServer

struct CoordinationServer::Connection {
  Connection(ConnectionId id_, net::Socket s) : id(id_), stream(std::move(s)) {}

  ConnectionId id;
  net::MessageConnection stream;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::vector<std::uint8_t>> queue;
  bool closing = false;
  std::thread reader;
  std::thread writer;
  std::atomic<int> done{0};
};

CoordinationServer::CoordinationServer(ServerOptions options)
    : options_(std::move(options)), session_(options_.mode) {}

CoordinationServer::~CoordinationServer() { stop(); }

std::uint16_t CoordinationServer::start() {
  listener_ = net::listen_tcp(options_.bind);
  port_ = net::local_port(listener_);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
  log_line("event=listen bind=" + endpoint().to_string());
  return port_;
}

void CoordinationServer::stop() {
  if (!running_.exchange(false)) return;
  if (acceptor_.joinable()) acceptor_.join();
  listener_.close();

  std::vector<std::shared_ptr<Connection>> all;
  {
    std::lock_guard lock(mutex_);
    for (auto& [id, c] : connections_) all.push_back(c);
    all.insert(all.end(), finished_.begin(), finished_.end());
    finished_.clear();
  }
  for (auto& c : all) c->stream.close();
  for (auto& c : all) {
    if (c->reader.joinable()) c->reader.join();
  }
  for (auto& c : all) {
    {
      std::lock_guard lock(c->mu);
      c->closing = true;
    }
    c->cv.notify_all();
    if (c->writer.joinable()) c->writer.join();
  }
  std::lock_guard lock(mutex_);
  connections_.clear();
  finished_.clear();
  log_line("event=stop");
}

net::Endpoint CoordinationServer::endpoint() const { return {options_.bind.host, port_}; }

ServerStats CoordinationServer::stats() const {
  std::lock_guard lock(mutex_);
  return {session_.counters(), overflow_disconnects_, protocol_errors_, connections_.size()};
}

std::optional<Polygon2> CoordinationServer::current_intersection() const {
  std::lock_guard lock(mutex_);
  return session_.current_intersection();
}

void CoordinationServer::log_line(const std::string& line) {
  if (options_.log) (*options_.log) << line << std::endl;
}

void CoordinationServer::accept_loop() {
  while (running_) {
    reap_finished();
    pollfd pfd{listener_.fd(), POLLIN, 0};
    if (::poll(&pfd, 1, 50) <= 0) continue;
    const int fd = ::accept4(listener_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

    std::lock_guard lock(mutex_);
    auto conn = std::make_shared<Connection>(next_connection_++, net::Socket(fd));
    connections_[conn->id] = conn;
    conn->writer = std::thread([this, conn] { write_loop(conn); });
    conn->reader = std::thread([this, conn] { read_loop(conn); });
  }
}

void CoordinationServer::reap_finished() {
  std::vector<std::shared_ptr<Connection>> ready;
  {
    std::lock_guard lock(mutex_);
    auto split = std::partition(finished_.begin(), finished_.end(), [](const auto& c) { return c->done < 2; });
    ready.assign(split, finished_.end());
    finished_.erase(split, finished_.end());
  }
  for (auto& c : ready) {
    if (c->reader.joinable()) c->reader.join();
    if (c->writer.joinable()) c->writer.join();
  }
}

void CoordinationServer::dispatch(const std::vector<Outgoing>& out) {
  for (const auto& o : out) {
    auto it = connections_.find(o.to);
    if (it == connections_.end()) continue;
    const auto& conn = it->second;
    std::vector<std::uint8_t> bytes = protocol::encode(o.msg);
    bool overflow = false;
    {
      std::lock_guard lock(conn->mu);
      if (conn->closing) continue;
      if (conn->queue.size() >= options_.queue_depth) {
        conn->queue.clear();
        conn->closing = true;
        overflow = true;
      } else {
        conn->queue.push_back(std::move(bytes));
      }
    }
    conn->cv.notify_one();
    if (overflow) {
      ++overflow_disconnects_;
      conn->stream.close();
      log_line("event=overflow connection=" + std::to_string(conn->id));
    }
  }
}

void CoordinationServer::send_error(const std::shared_ptr<Connection>& conn, const std::string& code,
                                    const std::string& text) {
  dispatch({{conn->id, protocol::ErrorReply{code, text}}});
}

void CoordinationServer::read_loop(const std::shared_ptr<Connection>& conn) {
  try {
    while (running_) {
      std::optional<protocol::WireMessage> msg;
      try {
        msg = conn->stream.receive(std::chrono::milliseconds(100));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonMonotonicSeq) throw;
        std::lock_guard lock(mutex_);
        session_.record_stale_drop();
        log_line("event=drop reason=stale_seq connection=" + std::to_string(conn->id));
        continue;
      }
      if (!msg) continue;

      std::lock_guard lock(mutex_);
      try {
        if (const auto* reg = std::get_if<protocol::Register>(&*msg)) {
          dispatch(session_.handle_register(conn->id, *reg));
          const int uid = *session_.user_for(conn->id);
          log_line("event=join user=" + std::to_string(uid) + " total=" + std::to_string(session_.users().size()) +
                   " mode=" + std::string(to_string(reg->mode)));
        } else if (const auto* pose = std::get_if<protocol::PoseUpdate>(&*msg)) {
          const auto dropped = session_.counters().poses_dropped;
          dispatch(session_.handle_pose_update(conn->id, *pose));
          if (session_.counters().poses_dropped != dropped) {
            log_line("event=drop reason=stale_seq user=" + std::to_string(pose->user_id));
          }
        } else if (const auto* boundary = std::get_if<protocol::PlaneBoundary>(&*msg)) {
          dispatch(session_.handle_plane_boundary(conn->id, *boundary));
          const auto& inter = session_.current_intersection();
          log_line("event=boundary user=" + std::to_string(boundary->user_id) +
                   " intersection_vertices=" + std::to_string(inter ? inter->size() : 0));
        } else {
          send_error(conn, "UnexpectedMessage",
                     std::string(protocol::type_name(*msg)) + " is not accepted by the server");
        }
      } catch (const Error& e) {
        send_error(conn, std::string(to_string(e.code())), e.what());
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConnectionFailed) {
      std::lock_guard lock(mutex_);
      ++protocol_errors_;
      send_error(conn, std::string(to_string(e.code())), e.what());
      log_line("event=protocol_error connection=" + std::to_string(conn->id) + " code=" +
               std::string(to_string(e.code())));
    }
  }
  drop_connection(conn);
  ++conn->done;
}

void CoordinationServer::write_loop(const std::shared_ptr<Connection>& conn) {
  for (;;) {
    std::vector<std::uint8_t> bytes;
    {
      std::unique_lock lock(conn->mu);
      conn->cv.wait(lock, [&] { return conn->closing || !conn->queue.empty(); });
      if (conn->queue.empty()) break;
      bytes = std::move(conn->queue.front());
      conn->queue.pop_front();
    }
    try {
      net::send_all(conn->stream.socket(), bytes);
    } catch (const Error&) {
      break;
    }
  }
  conn->stream.close();
  ++conn->done;
}

void CoordinationServer::drop_connection(const std::shared_ptr<Connection>& conn) {
  {
    std::lock_guard lock(mutex_);
    if (auto uid = session_.user_for(conn->id)) {
      auto out = session_.handle_disconnect(*uid);
      connections_.erase(conn->id);
      dispatch(out);
      log_line("event=leave user=" + std::to_string(*uid) + " total=" + std::to_string(session_.users().size()));
    } else {
      connections_.erase(conn->id);
    }
    finished_.push_back(conn);
  }
  {
    std::lock_guard lock(conn->mu);
    conn->closing = true;
  }
  conn->cv.notify_all();
}

}  // namespace arcoord
