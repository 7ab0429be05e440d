#pragma once

#include "privadome/mpc/share.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace privadome::mpc {

/// Message type codes; these are also the wire protocol's frame types.
enum class MsgType : std::uint8_t {
  Hello = 0x01,
  ThetasIds = 0x02,
  InputShareBatch = 0x03,
  MulRound = 0x04,
  Reveal = 0x05,
  Bye = 0x06,
  Error = 0x7F,
};

std::optional<MsgType> msg_type_from_byte(std::uint8_t b);
std::string_view to_string(MsgType t);

/// Online messages carry share material; the rest is session control.
inline bool is_online(MsgType t) {
  return t == MsgType::InputShareBatch || t == MsgType::MulRound || t == MsgType::Reveal;
}

enum class Direction : std::uint8_t { CitizenToAuthority = 0, AuthorityToCitizen = 1 };

inline Direction direction_from(PartyRole sender) {
  return sender == PartyRole::Citizen ? Direction::CitizenToAuthority
                                      : Direction::AuthorityToCitizen;
}

struct MessageRecord {
  Direction direction;
  MsgType type;
  std::size_t payload_bytes;
  std::uint32_t round;

  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

/// Byte-exact log of everything exchanged in one session, as seen by one party.
/// Counters cover payload bytes; framing headers are accounted separately.
class Transcript {
 public:
  /// Opens the next communication round; subsequent messages are tagged with it.
  void begin_round() { ++rounds_; }
  void record(Direction dir, MsgType type, std::size_t payload_bytes);
  void add_preprocessing(std::size_t bytes) { preprocessing_bytes_ += bytes; }

  [[nodiscard]] std::uint32_t rounds() const { return rounds_; }
  [[nodiscard]] const std::vector<MessageRecord>& messages() const { return messages_; }
  [[nodiscard]] std::size_t bytes(Direction dir) const { return bytes_[index(dir)]; }
  [[nodiscard]] std::size_t total_bytes() const { return bytes_[0] + bytes_[1]; }
  [[nodiscard]] std::size_t online_bytes(Direction dir) const { return online_[index(dir)]; }
  [[nodiscard]] std::size_t online_total() const { return online_[0] + online_[1]; }
  [[nodiscard]] std::size_t message_count(Direction dir) const;
  [[nodiscard]] std::size_t preprocessing_bytes() const { return preprocessing_bytes_; }

  /// The online part of the log: (direction, type, size, round) of every share message.
  [[nodiscard]] std::vector<MessageRecord> online_messages() const;

  /// Number of fragments in messages of `type` travelling in `dir`.
  [[nodiscard]] std::size_t fragments(Direction dir, MsgType type) const;

 private:
  static std::size_t index(Direction d) { return static_cast<std::size_t>(d); }

  std::vector<MessageRecord> messages_;
  std::size_t bytes_[2] = {0, 0};
  std::size_t online_[2] = {0, 0};
  std::size_t preprocessing_bytes_ = 0;
  std::uint32_t rounds_ = 0;
};

}  // namespace privadome::mpc
