#include "arcoord/socket.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>

#include "arcoord/error.hpp"

namespace arcoord::net {

namespace {

sockaddr_in to_sockaddr(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  const std::string host = ep.host == "localhost" ? "127.0.0.1" : ep.host;
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "not an IPv4 address: " + ep.host);
  }
  return addr;
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorCode::InvalidArgument, "expected host:port, got '" + text + "'");
  }
  Endpoint ep;
  ep.host = text.substr(0, colon);
  try {
    std::size_t used = 0;
    const int port = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1 || port < 0 || port > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad port in '" + text + "'");
  }
  to_sockaddr(ep);
  return ep;
}

Socket::~Socket() { close(); }

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void Socket::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Socket listen_tcp(const Endpoint& bind, int backlog) {
  const sockaddr_in addr = to_sockaddr(bind);
  Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!s.valid()) throw Error(ErrorCode::ConnectionFailed, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw Error(ErrorCode::ConnectionFailed, "bind " + bind.to_string() + ": " + std::strerror(errno));
  }
  if (::listen(s.fd(), backlog) != 0) {
    throw Error(ErrorCode::ConnectionFailed, std::string("listen: ") + std::strerror(errno));
  }
  return s;
}

std::uint16_t local_port(const Socket& s) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) return 0;
  return ntohs(addr.sin_port);
}

Socket connect_tcp(const Endpoint& remote) {
  const sockaddr_in addr = to_sockaddr(remote);
  Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!s.valid()) throw Error(ErrorCode::ConnectionFailed, std::string("socket: ") + std::strerror(errno));
  if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw Error(ErrorCode::ConnectionFailed, "connect " + remote.to_string() + ": " + std::strerror(errno));
  }
  set_nodelay(s.fd());
  return s;
}

void send_all(const Socket& s, std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(s.fd(), bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::ConnectionFailed, std::string("send: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

void MessageConnection::send(const protocol::WireMessage& msg) { send_all(socket_, protocol::encode(msg)); }

std::optional<protocol::WireMessage> MessageConnection::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::array<std::uint8_t, 16384> buf{};
  for (;;) {
    if (auto msg = reader_.next()) return msg;

    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0 && timeout.count() > 0) return std::nullopt;

    pollfd pfd{socket_.fd(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::max<long long>(remaining.count(), 0)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::ConnectionFailed, std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) return std::nullopt;

    const ssize_t n = ::recv(socket_.fd(), buf.data(), buf.size(), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::ConnectionFailed, std::string("recv: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (reader_.has_partial()) throw Error(ErrorCode::MalformedFrame, "connection closed mid-frame");
      throw Error(ErrorCode::ConnectionFailed, "connection closed by peer");
    }
    reader_.feed(std::span(buf.data(), static_cast<std::size_t>(n)));
  }
}

}  // namespace arcoord::net
