#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "arcoord/protocol.hpp"

namespace arcoord::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// Parses "host:port" (IPv4 literal or "localhost"). Throws InvalidArgument.
Endpoint parse_endpoint(const std::string& text);

/// Owning file descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  /// Shuts down both directions; wakes threads blocked on the descriptor.
  void shutdown();
  void close();

 private:
  int fd_ = -1;
};

/// Bound, listening socket. Port 0 selects an ephemeral port.
Socket listen_tcp(const Endpoint& bind, int backlog = 64);
std::uint16_t local_port(const Socket& s);
/// Throws ConnectionFailed.
Socket connect_tcp(const Endpoint& remote);

/// Writes everything or throws ConnectionFailed.
void send_all(const Socket& s, std::span<const std::uint8_t> bytes);

/// Framed message stream over a connected socket. One reader and one writer
/// may use it concurrently.
class MessageConnection {
 public:
  explicit MessageConnection(Socket socket) : socket_(std::move(socket)) {}

  void send(const protocol::WireMessage& msg);

  /// Next message, or nullopt on timeout. Throws ConnectionFailed on EOF or
  /// socket error, MalformedFrame / NonMonotonicSeq from the frame reader.
  std::optional<protocol::WireMessage> receive(std::chrono::milliseconds timeout);

  void close() { socket_.shutdown(); }
  const Socket& socket() const { return socket_; }

 private:
  Socket socket_;
  protocol::FrameReader reader_;
};

}  // namespace arcoord::net
