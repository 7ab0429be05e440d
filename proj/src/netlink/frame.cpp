#include "privadome/netlink/frame.hpp"

#include <bit>
#include <cstdio>

namespace privadome::net {
namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  template <typename T>
  T le(const char* what) {
    need(sizeof(T), what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::uint8_t> bytes(std::size_t n, const char* what) {
    need(n, what);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  void finish(const char* what) const {
    if (pos_ != b_.size()) throw FrameError(std::string(what) + ": trailing bytes");
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (b_.size() - pos_ < n) throw FrameError(std::string(what) + ": truncated payload");
  }

  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_frame(mpc::MsgType type, std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxPayloadBytes) throw FrameError("frame payload exceeds 64 MiB");
  const auto len = static_cast<std::uint32_t>(payload.size());
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + payload.size());
  out.push_back(static_cast<std::uint8_t>(len >> 24));
  out.push_back(static_cast<std::uint8_t>(len >> 16));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len));
  out.push_back(static_cast<std::uint8_t>(type));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

FrameHeader decode_header(std::span<const std::uint8_t, kFrameHeaderBytes> b) {
  FrameHeader h;
  h.length = (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
  h.type_byte = b[4];
  if (h.length > kMaxPayloadBytes) throw FrameError("frame payload of " + std::to_string(h.length) + " bytes exceeds 64 MiB");
  return h;
}

std::optional<Frame> decode_frame(std::span<const std::uint8_t> bytes, std::size_t& consumed) {
  consumed = 0;
  if (bytes.size() < kFrameHeaderBytes) return std::nullopt;
  const FrameHeader h = decode_header(bytes.first<kFrameHeaderBytes>());
  const auto type = mpc::msg_type_from_byte(h.type_byte);
  if (!type) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%02X", h.type_byte);
    throw FrameError(std::string("unknown message type ") + buf);
  }
  if (bytes.size() - kFrameHeaderBytes < h.length) return std::nullopt;
  Frame f{*type, {bytes.begin() + kFrameHeaderBytes, bytes.begin() + kFrameHeaderBytes + h.length}};
  consumed = kFrameHeaderBytes + h.length;
  return f;
}

std::vector<std::uint8_t> encode_hello(const Hello& h) {
  std::vector<std::uint8_t> out;
  put_le(out, h.version);
  out.push_back(static_cast<std::uint8_t>(h.variant));
  put_le(out, h.n);
  out.insert(out.end(), h.session_id.begin(), h.session_id.end());
  return out;
}

Hello decode_hello(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  Hello h;
  h.version = r.le<std::uint16_t>("HELLO");
  const auto variant = r.le<std::uint8_t>("HELLO");
  if (variant > 1) throw FrameError("HELLO: unknown variant " + std::to_string(variant));
  h.variant = static_cast<shortlist::Variant>(variant);
  h.n = r.le<std::uint32_t>("HELLO");
  const auto id = r.bytes(h.session_id.size(), "HELLO");
  std::copy(id.begin(), id.end(), h.session_id.begin());
  r.finish("HELLO");
  return h;
}

std::vector<std::uint8_t> encode_thetas_ids(std::span<const PublicDrone> drones) {
  std::vector<std::uint8_t> out;
  put_le(out, static_cast<std::uint32_t>(drones.size()));
  for (const auto& d : drones) {
    if (d.id.size() > 0xFFFF) throw FrameError("drone id longer than 65535 bytes");
    put_le(out, std::bit_cast<std::uint64_t>(d.theta_rad));
    put_le(out, static_cast<std::uint16_t>(d.id.size()));
    out.insert(out.end(), d.id.begin(), d.id.end());
  }
  return out;
}

std::vector<PublicDrone> decode_thetas_ids(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  const auto count = r.le<std::uint32_t>("THETAS_IDS");
  // Each entry needs at least 10 bytes; reject counts the payload cannot hold.
  if (count > payload.size() / 10) throw FrameError("THETAS_IDS: count exceeds payload");
  std::vector<PublicDrone> out(count);
  for (auto& d : out) {
    d.theta_rad = std::bit_cast<double>(r.le<std::uint64_t>("THETAS_IDS"));
    const auto len = r.le<std::uint16_t>("THETAS_IDS");
    const auto id = r.bytes(len, "THETAS_IDS");
    d.id.assign(id.begin(), id.end());
  }
  r.finish("THETAS_IDS");
  return out;
}

}  // namespace privadome::net
