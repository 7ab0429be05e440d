#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace privadome::mpc {

class EncodingError : public std::range_error {
 public:
  using std::range_error::range_error;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Element of Z / 2^128. Unsigned wrap-around is exactly ring arithmetic.
using RingElement = unsigned __int128;
using SignedRing = __int128;

/// A batch of ring elements; the unit every share operation works on.
using RingVector = Eigen::Array<RingElement, Eigen::Dynamic, 1>;

inline constexpr std::size_t kFragmentBytes = 16;

/// Largest magnitude (exclusive) a signed raw value may take at any gate.
inline constexpr int kMagnitudeBits = 126;

inline SignedRing to_signed(RingElement v) { return static_cast<SignedRing>(v); }
inline RingElement from_signed(SignedRing v) { return static_cast<RingElement>(v); }

/// signed(raw) / 2^scale_exp. The scale is public and fixed per wire.
struct FixedPoint {
  RingElement raw = 0;
  int scale_exp = 0;

  friend bool operator==(const FixedPoint&, const FixedPoint&) = default;
};

/// Round-half-away-from-zero encoding; throws EncodingError when
/// |value * 2^scale_exp| reaches 2^126 or the value is not finite.
FixedPoint fx_encode(double value, int scale_exp);
double fx_decode(const FixedPoint& fx);
long double fx_decode_long(const FixedPoint& fx);

/// Exact integer-to-ring encoding at scale 0 or any scale (value * 2^scale).
FixedPoint fx_from_integer(std::int64_t value, int scale_exp = 0);

/// Signed raw value as a decimal string (for diagnostics and tests).
std::string to_string(SignedRing v);

void append_fragment(std::vector<std::uint8_t>& out, RingElement v);
RingElement read_fragment(std::span<const std::uint8_t> bytes, std::size_t index);

std::vector<std::uint8_t> serialize_fragments(const RingVector& v);
RingVector deserialize_fragments(std::span<const std::uint8_t> bytes);

}  // namespace privadome::mpc
