#pragma once

#include "privadome/mpc/channel.hpp"

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <span>
#include <string>
#include <utility>

namespace privadome::net {

/// Connection-level failure: refused, reset, closed mid-frame.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(o.release()) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  [[nodiscard]] int fd() const { return fd_; }
  [[nodiscard]] bool valid() const { return fd_ >= 0; }
  int release() { return std::exchange(fd_, -1); }
  void shutdown();

  void write_all(std::span<const std::uint8_t> bytes);
  /// Returns false on a clean EOF before the first byte.
  bool read_exact(std::span<std::uint8_t> out);

 private:
  int fd_ = -1;
};

Socket connect_tcp(const std::string& host, std::uint16_t port);

class TcpListener {
 public:
  /// Port 0 binds an ephemeral port; see port().
  TcpListener(const std::string& host, std::uint16_t port);
  [[nodiscard]] std::uint16_t port() const { return port_; }
  /// Blocks until a client connects or the listener is shut down (returns an invalid socket).
  Socket accept();
  void shutdown();

 private:
  Socket sock_;
  std::uint16_t port_ = 0;
};

/**
 * Channel over a connected TCP socket. Counts every byte written and read,
 * headers included. An unknown message type is answered with ERROR and
 * reported as a ProtocolError.
 */
class SocketChannel : public mpc::Channel {
 public:
  explicit SocketChannel(Socket sock) : sock_(std::move(sock)) {}

  void send(mpc::MsgType type, std::span<const std::uint8_t> payload) override;
  mpc::Message recv() override;
  void close() override { sock_.shutdown(); }

  [[nodiscard]] std::uint64_t bytes_sent() const { return sent_; }
  [[nodiscard]] std::uint64_t bytes_received() const { return received_; }
  [[nodiscard]] std::uint64_t frames_sent() const { return frames_sent_; }
  [[nodiscard]] std::uint64_t frames_received() const { return frames_received_; }

 private:
  Socket sock_;
  std::atomic<std::uint64_t> sent_{0};
  std::atomic<std::uint64_t> received_{0};
  std::atomic<std::uint64_t> frames_sent_{0};
  std::atomic<std::uint64_t> frames_received_{0};
};

}  // namespace privadome::net
