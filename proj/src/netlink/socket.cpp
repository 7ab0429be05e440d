#include "privadome/netlink/socket.hpp"

#include "privadome/netlink/frame.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

namespace privadome::net {
namespace {

std::string errno_text(const std::string& what) { return what + ": " + std::strerror(errno); }

}  // namespace

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = o.release();
  }
  return *this;
}

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

void Socket::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::write_all(std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t k = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw NetworkError(errno_text("send"));
    }
    off += static_cast<std::size_t>(k);
  }
}

bool Socket::read_exact(std::span<std::uint8_t> out) {
  std::size_t off = 0;
  while (off < out.size()) {
    const ssize_t k = ::recv(fd_, out.data() + off, out.size() - off, 0);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw NetworkError(errno_text("recv"));
    }
    if (k == 0) {
      if (off == 0) return false;
      throw NetworkError("connection closed mid-frame");
    }
    off += static_cast<std::size_t>(k);
  }
  return true;
}

Socket connect_tcp(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw NetworkError("resolve " + host + ": " + ::gai_strerror(rc));
  }
  std::string last = "no addresses";
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!s.valid()) {
      last = errno_text("socket");
      continue;
    }
    if (::connect(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
      ::freeaddrinfo(res);
      const int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return s;
    }
    last = errno_text("connect " + host + ":" + service);
  }
  ::freeaddrinfo(res);
  throw NetworkError(last);
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
      rc != 0) {
    throw NetworkError("resolve " + host + ": " + ::gai_strerror(rc));
  }
  std::string last = "no addresses";
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!s.valid()) continue;
    const int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) != 0 || ::listen(s.fd(), 64) != 0) {
      last = errno_text("bind " + host + ":" + service);
      continue;
    }
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                                             : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    sock_ = std::move(s);
    break;
  }
  ::freeaddrinfo(res);
  if (!sock_.valid()) throw NetworkError(last);
}

Socket TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(sock_.fd(), nullptr, nullptr);
    if (fd >= 0) {
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return Socket(fd);
    }
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return Socket();
  }
}

void TcpListener::shutdown() { sock_.shutdown(); }

void SocketChannel::send(mpc::MsgType type, std::span<const std::uint8_t> payload) {
  const std::vector<std::uint8_t> frame = encode_frame(type, payload);
  sock_.write_all(frame);
  sent_ += frame.size();
  ++frames_sent_;
}

mpc::Message SocketChannel::recv() {
  std::array<std::uint8_t, kFrameHeaderBytes> header{};
  if (!sock_.read_exact(header)) throw mpc::ProtocolError("peer closed the connection");
  FrameHeader h;
  try {
    h = decode_header(header);
  } catch (const FrameError& e) {
    const std::string reason = e.what();
    try {
      send(mpc::MsgType::Error, {reinterpret_cast<const std::uint8_t*>(reason.data()), reason.size()});
    } catch (...) {
    }
    throw mpc::ProtocolError(reason);
  }
  mpc::Message m;
  m.payload.resize(h.length);
  if (h.length > 0 && !sock_.read_exact(m.payload)) throw NetworkError("connection closed mid-frame");
  received_ += kFrameHeaderBytes + h.length;
  ++frames_received_;
  const auto type = mpc::msg_type_from_byte(h.type_byte);
  if (!type) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%02X", h.type_byte);
    const std::string reason = std::string("unknown message type ") + buf;
    try {
      send(mpc::MsgType::Error, {reinterpret_cast<const std::uint8_t*>(reason.data()), reason.size()});
    } catch (...) {
    }
    throw mpc::ProtocolError(reason);
  }
  m.type = *type;
  return m;
}

}  // namespace privadome::net
