#pragma once

// Length-prefixed binary framing and the control-message payloads.
//
//   frame   := length:u32 BE | type:u8 | payload[length]
//   HELLO   := version:u16 LE | variant:u8 | n:u32 LE | session_id[16]
//   THETAS_IDS := count:u32 LE | { theta:f64 LE | id_len:u16 LE | id[id_len] }*

#include "privadome/mpc/transcript.hpp"
#include "privadome/shortlist/shortlist.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace privadome::net {

class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 5;
inline constexpr std::size_t kMaxPayloadBytes = std::size_t{64} << 20;

struct Frame {
  mpc::MsgType type = mpc::MsgType::Error;
  std::vector<std::uint8_t> payload;
  friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::uint8_t> encode_frame(mpc::MsgType type, std::span<const std::uint8_t> payload);

struct FrameHeader {
  std::uint32_t length = 0;
  std::uint8_t type_byte = 0;
};

/// Throws FrameError on oversize payloads. The type byte is not checked here.
FrameHeader decode_header(std::span<const std::uint8_t, kFrameHeaderBytes> bytes);

/// Decodes one frame from the front of `bytes`. Returns nullopt when more
/// bytes are needed; throws FrameError on oversize or unknown type.
std::optional<Frame> decode_frame(std::span<const std::uint8_t> bytes, std::size_t& consumed);

struct Hello {
  std::uint16_t version = kProtocolVersion;
  shortlist::Variant variant = shortlist::Variant::Oblivious;
  std::uint32_t n = 0;
  shortlist::SessionId session_id{};
  friend bool operator==(const Hello&, const Hello&) = default;
};

std::vector<std::uint8_t> encode_hello(const Hello& h);
Hello decode_hello(std::span<const std::uint8_t> payload);

struct PublicDrone {
  std::string id;
  double theta_rad = 0;
  friend bool operator==(const PublicDrone&, const PublicDrone&) = default;
};

std::vector<std::uint8_t> encode_thetas_ids(std::span<const PublicDrone> drones);
std::vector<PublicDrone> decode_thetas_ids(std::span<const std::uint8_t> payload);

}  // namespace privadome::net
