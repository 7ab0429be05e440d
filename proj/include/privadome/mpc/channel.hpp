#pragma once

#include "privadome/mpc/transcript.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace privadome::mpc {

struct Message {
  MsgType type = MsgType::Error;
  std::vector<std::uint8_t> payload;
};

/// Ordered, reliable, typed message pipe between the two parties.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(MsgType type, std::span<const std::uint8_t> payload) = 0;
  /// Blocks for the next message; throws ProtocolError if the peer has gone away.
  virtual Message recv() = 0;
  virtual void close() = 0;
};

/// Connected in-process pair: (citizen end, authority end).
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_memory_channel_pair();

/// A party's view of the channel: records every message in its transcript and
/// turns ERROR frames and unexpected types into ProtocolError.
class Endpoint {
 public:
  Endpoint(PartyRole role, Channel& channel, Transcript& transcript)
      : role_(role), channel_(channel), transcript_(transcript) {}

  void send(MsgType type, std::span<const std::uint8_t> payload);
  Message recv(MsgType expected);
  /// Best-effort ERROR frame before aborting a session.
  void send_error(std::string_view reason) noexcept;

  [[nodiscard]] PartyRole role() const { return role_; }
  Transcript& transcript() { return transcript_; }
  Channel& channel() { return channel_; }

 private:
  PartyRole role_;
  Channel& channel_;
  Transcript& transcript_;
};

}  // namespace privadome::mpc
