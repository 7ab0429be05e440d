#include "privadome/shortlist/encoding.hpp"

#include <cmath>

namespace privadome::shortlist {

double max_vicinity_deg(const geo::GeometryConstants& k) {
  // One meter of slack absorbs quantization of the arc inputs.
  return (kWindowMeters - 1.0) / k.meters_per_degree();
}

std::int64_t quantize(double v, int scale) {
  const mpc::SignedRing raw = mpc::to_signed(mpc::fx_encode(v, scale).raw);
  if (raw >= (mpc::SignedRing(1) << 62) || raw <= -(mpc::SignedRing(1) << 62)) {
    throw mpc::EncodingError("quantize: value does not fit 62 bits at scale " + std::to_string(scale));
  }
  return static_cast<std::int64_t>(raw);
}

}  // namespace privadome::shortlist
