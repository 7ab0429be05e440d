#include "privadome/shortlist/shortlist.hpp"

namespace privadome::shortlist {
namespace {

using mpc::CircuitPlan;
using mpc::FixedPoint;
using mpc::PartyRole;
using mpc::WireId;

constexpr double kDegreeSqBound = 1.0;
constexpr double kArcBound = 0x1p25;
constexpr double kMaskBound = kMaskLimit;

/// 1.0 at scale s: multiplies the raw value by 2^s without changing the decoded value.
FixedPoint rescale(int s) { return {mpc::RingElement(1) << s, s}; }

struct VicinityWires {
  WireId nearby_lat;
  WireId nearby_lon;
};

VicinityWires add_vicinity(CircuitPlan& p, std::size_t n) {
  const WireId lat_c = p.input(PartyRole::Citizen, "lat_c", 1, kDegreeScale, 90);
  const WireId lon_c = p.input(PartyRole::Citizen, "lon_c", 1, kDegreeScale, 180);
  const WireId lat_vic_sq = p.input(PartyRole::Citizen, "lat_vic_sq", 1, kDegreeSqScale, kDegreeSqBound);
  const WireId lon_vic_sq = p.input(PartyRole::Citizen, "lon_vic_sq", 1, kDegreeSqScale, kDegreeSqBound);
  const WireId mask_lat_c = p.input(PartyRole::Citizen, "mask_lat_c", n, kMaskScale, kMaskBound);
  const WireId mask_lon_c = p.input(PartyRole::Citizen, "mask_lon_c", n, kMaskScale, kMaskBound);

  const WireId lat_t = p.input(PartyRole::Authority, "lat_t", n, kDegreeScale, 90);
  const WireId lon_t = p.input(PartyRole::Authority, "lon_t", n, kDegreeScale, 180);
  const WireId mask_lat_a = p.input(PartyRole::Authority, "mask_lat_a", n, kMaskScale, kMaskBound);
  const WireId mask_lon_a = p.input(PartyRole::Authority, "mask_lon_a", n, kMaskScale, kMaskBound);

  const WireId lat_diff = p.sub(lat_c, lat_t);
  const WireId lon_diff = p.sub(lon_c, lon_t);
  const WireId lat_sq = p.mul(lat_diff, lat_diff);
  const WireId lon_sq = p.mul(lon_diff, lon_diff);
  const WireId mask_lat = p.mul(mask_lat_c, mask_lat_a);
  const WireId mask_lon = p.mul(mask_lon_c, mask_lon_a);
  return {p.mul(p.sub(lat_sq, lat_vic_sq), mask_lat), p.mul(p.sub(lon_sq, lon_vic_sq), mask_lon)};
}

struct FovWires {
  WireId dotp;
  WireId norm_sq;
};

FovWires add_fov(CircuitPlan& p, std::size_t n) {
  const WireId x_arc_c = p.input(PartyRole::Citizen, "x_arc_c", 1, kArcScale, kArcBound);
  const WireId y_arc_c = p.input(PartyRole::Citizen, "y_arc_c", 1, kArcScale, kArcBound);

  const WireId x_arc_t = p.input(PartyRole::Authority, "x_arc_t", n, kArcScale, kArcBound);
  const WireId y_arc_t = p.input(PartyRole::Authority, "y_arc_t", n, kArcScale, kArcBound);
  const WireId dx_cos = p.input(PartyRole::Authority, "dx_cos", n, kAxisScale + kCosScale, 1);
  const WireId dy = p.input(PartyRole::Authority, "dy", n, kAxisScale, 1);
  const WireId cos_sq = p.input(PartyRole::Authority, "cos_sq", n, 2 * kCosScale, 1);
  const WireId dnorm_sq = p.input(PartyRole::Authority, "dnorm_sq", n, kDNormScale, 1.001);

  // Exact for drones inside the window; outside it the drone fails the vicinity test anyway.
  const WireId ax = p.sub(x_arc_c, x_arc_t);
  const WireId ay = p.sub(y_arc_c, y_arc_t);
  p.assume_bound(ax, kWindowMeters);
  p.assume_bound(ay, kWindowMeters);

  const WireId dy_wide = p.mul_public(dy, rescale(kCosScale));
  const WireId dotp = p.add(p.mul(dx_cos, ax), p.mul(dy_wide, ay));

  const WireId ax_sq = p.mul(ax, ax);
  const WireId ay_sq = p.mul(ay, ay);
  const WireId cx_sq = p.mul(cos_sq, ax_sq);
  const WireId c_sq = p.add(cx_sq, p.mul_public(ay_sq, rescale(2 * kCosScale)));
  return {dotp, p.mul(dnorm_sq, c_sq)};
}

void require_positive(std::size_t n) {
  if (n == 0) throw mpc::PlanError("plan width must be at least 1");
}

}  // namespace

CircuitPlan build_oblivious_plan(std::size_t n) {
  require_positive(n);
  CircuitPlan p;
  const VicinityWires v = add_vicinity(p, n);
  const FovWires f = add_fov(p, n);
  p.reveal_to(v.nearby_lat, PartyRole::Citizen, "nearby_lat");
  p.reveal_to(v.nearby_lon, PartyRole::Citizen, "nearby_lon");
  p.reveal_to(f.dotp, PartyRole::Citizen, "dotp");
  p.reveal_to(f.norm_sq, PartyRole::Citizen, "norm_sq");
  return p;
}

CircuitPlan build_vicinity_plan(std::size_t n) {
  require_positive(n);
  CircuitPlan p;
  const VicinityWires v = add_vicinity(p, n);
  p.open(v.nearby_lat, "nearby_lat");
  p.open(v.nearby_lon, "nearby_lon");
  return p;
}

CircuitPlan build_fov_plan(std::size_t k) {
  require_positive(k);
  CircuitPlan p;
  const FovWires f = add_fov(p, k);
  p.reveal_to(f.dotp, PartyRole::Citizen, "dotp");
  p.reveal_to(f.norm_sq, PartyRole::Citizen, "norm_sq");
  return p;
}

CircuitPlan build_circuit_plan(std::size_t n, Variant variant) {
  return variant == Variant::Oblivious ? build_oblivious_plan(n) : build_vicinity_plan(n);
}

}  // namespace privadome::shortlist
