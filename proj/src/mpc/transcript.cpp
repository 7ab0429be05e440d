#include "privadome/mpc/transcript.hpp"

namespace privadome::mpc {

std::optional<MsgType> msg_type_from_byte(std::uint8_t b) {
  switch (b) {
    case 0x01: return MsgType::Hello;
    case 0x02: return MsgType::ThetasIds;
    case 0x03: return MsgType::InputShareBatch;
    case 0x04: return MsgType::MulRound;
    case 0x05: return MsgType::Reveal;
    case 0x06: return MsgType::Bye;
    case 0x7F: return MsgType::Error;
    default: return std::nullopt;
  }
}

std::string_view to_string(MsgType t) {
  switch (t) {
    case MsgType::Hello: return "HELLO";
    case MsgType::ThetasIds: return "THETAS_IDS";
    case MsgType::InputShareBatch: return "INPUT_SHARE_BATCH";
    case MsgType::MulRound: return "MUL_ROUND";
    case MsgType::Reveal: return "REVEAL";
    case MsgType::Bye: return "BYE";
    case MsgType::Error: return "ERROR";
  }
  return "UNKNOWN";
}

void Transcript::record(Direction dir, MsgType type, std::size_t payload_bytes) {
  messages_.push_back({dir, type, payload_bytes, is_online(type) ? rounds_ : 0});
  bytes_[index(dir)] += payload_bytes;
  if (is_online(type)) online_[index(dir)] += payload_bytes;
}

std::size_t Transcript::message_count(Direction dir) const {
  std::size_t n = 0;
  for (const auto& m : messages_) n += m.direction == dir;
  return n;
}

std::vector<MessageRecord> Transcript::online_messages() const {
  std::vector<MessageRecord> out;
  for (const auto& m : messages_) {
    if (is_online(m.type)) out.push_back(m);
  }
  return out;
}

std::size_t Transcript::fragments(Direction dir, MsgType type) const {
  std::size_t bytes = 0;
  for (const auto& m : messages_) {
    if (m.direction == dir && m.type == type) bytes += m.payload_bytes;
  }
  return bytes / kFragmentBytes;
}

}  // namespace privadome::mpc
