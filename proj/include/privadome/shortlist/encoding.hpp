#pragma once

// Fixed-point layout of every protocol wire. All multiplications add scale
// exponents; the largest wire (norm_sq, scale 92) stays below 2^122.

#include "privadome/geometry.hpp"
#include "privadome/mpc/ring.hpp"

#include <cstdint>

namespace privadome::shortlist {

/// Latitude / longitude in degrees.
inline constexpr int kDegreeScale = 32;
/// Squared degree thresholds.
inline constexpr int kDegreeSqScale = 2 * kDegreeScale;
/// K·lat and K·lon in arc-meters, K = R·pi/180.
inline constexpr int kArcScale = 14;
/// cos of the drone latitude.
inline constexpr int kCosScale = 16;
/// Components of the unit camera axis.
inline constexpr int kAxisScale = 16;
/// Masks are integers.
inline constexpr int kMaskScale = 0;

/// Scale of the x term of D·C: axis · cos · arc.
inline constexpr int kDotScale = kAxisScale + kCosScale + kArcScale;
inline constexpr int kCSqScale = 2 * (kCosScale + kArcScale);
inline constexpr int kDNormScale = 2 * kAxisScale;
inline constexpr int kNormScale = kDNormScale + kCSqScale;

inline constexpr std::uint32_t kMaskLimit = 1u << 20;

/// |K·Δlat| and |K·Δlon| of any in-vicinity drone must stay below this.
inline constexpr double kWindowMeters = 16384.0;

/// Largest vicinity threshold in degrees the C-path window admits.
double max_vicinity_deg(const geo::GeometryConstants& k = geo::kDefaultConstants);

/// Rounds `v·2^scale` half away from zero and returns it as a signed integer.
std::int64_t quantize(double v, int scale);

}  // namespace privadome::shortlist
