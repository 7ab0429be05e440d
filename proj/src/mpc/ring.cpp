#include "privadome/mpc/ring.hpp"

#include <algorithm>
#include <cmath>

namespace privadome::mpc {

FixedPoint fx_encode(double value, int scale_exp) {
  if (!std::isfinite(value)) throw EncodingError("fx_encode: value is not finite");
  const double scaled = std::round(std::ldexp(value, scale_exp));
  if (!(std::abs(scaled) < std::ldexp(1.0, kMagnitudeBits))) {
    throw EncodingError("fx_encode: |value * 2^" + std::to_string(scale_exp) +
                        "| exceeds 2^126");
  }
  SignedRing raw;
  if (std::abs(scaled) < 0x1p62) {
    raw = static_cast<std::int64_t>(scaled);
  } else {
    // Above 2^62 a double is an integer; rebuild it from mantissa and exponent.
    int exp = 0;
    const double mantissa = std::frexp(std::abs(scaled), &exp);
    const auto bits = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
    raw = static_cast<SignedRing>(bits) << (exp - 53);
    if (scaled < 0) raw = -raw;
  }
  return {from_signed(raw), scale_exp};
}

long double fx_decode_long(const FixedPoint& fx) {
  const SignedRing s = to_signed(fx.raw);
  const bool neg = s < 0;
  const RingElement mag = neg ? RingElement(0) - fx.raw : fx.raw;
  const auto hi = static_cast<std::uint64_t>(mag >> 64);
  const auto lo = static_cast<std::uint64_t>(mag);
  long double v = std::ldexp(static_cast<long double>(hi), 64) + static_cast<long double>(lo);
  v = std::ldexp(v, -fx.scale_exp);
  return neg ? -v : v;
}

double fx_decode(const FixedPoint& fx) { return static_cast<double>(fx_decode_long(fx)); }

FixedPoint fx_from_integer(std::int64_t value, int scale_exp) {
  if (scale_exp < 0 || scale_exp + 64 > kMagnitudeBits) {
    throw EncodingError("fx_from_integer: scale out of range");
  }
  return {from_signed(static_cast<SignedRing>(value) << scale_exp), scale_exp};
}

std::string to_string(SignedRing v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  RingElement mag = neg ? RingElement(0) - static_cast<RingElement>(v) : static_cast<RingElement>(v);
  std::string digits;
  while (mag != 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
    mag /= 10;
  }
  if (neg) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

void append_fragment(std::vector<std::uint8_t>& out, RingElement v) {
  for (std::size_t i = 0; i < kFragmentBytes; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

RingElement read_fragment(std::span<const std::uint8_t> bytes, std::size_t index) {
  const std::size_t off = index * kFragmentBytes;
  if (off + kFragmentBytes > bytes.size()) throw ProtocolError("fragment read past end of payload");
  RingElement v = 0;
  for (std::size_t i = 0; i < kFragmentBytes; ++i) {
    v |= static_cast<RingElement>(bytes[off + i]) << (8 * i);
  }
  return v;
}

std::vector<std::uint8_t> serialize_fragments(const RingVector& v) {
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(v.size()) * kFragmentBytes);
  for (Eigen::Index i = 0; i < v.size(); ++i) append_fragment(out, v(i));
  return out;
}

RingVector deserialize_fragments(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kFragmentBytes != 0) {
    throw ProtocolError("payload is not a whole number of 16-byte fragments");
  }
  RingVector v(static_cast<Eigen::Index>(bytes.size() / kFragmentBytes));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = read_fragment(bytes, static_cast<std::size_t>(i));
  return v;
}

}  // namespace privadome::mpc
