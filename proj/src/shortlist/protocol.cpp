#include "privadome/shortlist/shortlist.hpp"

#include <cmath>
#include <string>

namespace privadome::shortlist {
namespace {

using mpc::PartyRole;
using mpc::RingElement;
using mpc::RingVector;

RingElement ring(std::int64_t v) { return mpc::from_signed(mpc::SignedRing(v)); }
RingElement ring(mpc::SignedRing v) { return mpc::from_signed(v); }

std::string hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (const auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

RingVector mask_vector(const MaskSet& masks, bool lat) {
  RingVector v(static_cast<Eigen::Index>(masks.size()));
  for (std::size_t i = 0; i < masks.size(); ++i) v(static_cast<Eigen::Index>(i)) = lat ? masks[i].lat : masks[i].lon;
  return v;
}

void validate_masks(const MaskSet& masks, std::size_t n, const char* owner) {
  if (masks.size() != n) {
    throw geo::DomainError(std::string(owner) + " masks: expected " + std::to_string(n) + ", got " +
                           std::to_string(masks.size()));
  }
  for (const auto& m : masks) {
    if (m.lat < 1 || m.lat >= kMaskLimit || m.lon < 1 || m.lon >= kMaskLimit) {
      throw geo::DomainError(std::string(owner) + " masks must lie in [1, 2^20)");
    }
  }
}

std::vector<std::size_t> nearby_indices(const mpc::PlanOutputs& out, std::size_t n) {
  const auto& lat = out.at("nearby_lat");
  const auto& lon = out.at("nearby_lon");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    if (is_nearby(lat.at(e), lon.at(e))) idx.push_back(i);
  }
  return idx;
}

mpc::TripleStore draw_triples(mpc::DealerStream& dealer, mpc::Endpoint& ep, std::size_t count) {
  std::size_t bytes = 0;
  mpc::TripleStore store = dealer.next(ep.role(), count, &bytes);
  ep.transcript().add_preprocessing(bytes);
  return store;
}

}  // namespace

std::string_view to_string(Variant v) {
  return v == Variant::Oblivious ? "oblivious" : "non-oblivious";
}

std::optional<Variant> variant_from_string(std::string_view s) {
  if (s == "oblivious") return Variant::Oblivious;
  if (s == "non-oblivious") return Variant::NonOblivious;
  return std::nullopt;
}

DroneInput derive_drone_input(const geo::DronePose& pose, const geo::GeometryConstants& k) {
  geo::validate(pose.pos_t);
  geo::validate(pose.pos_t_delta);
  DroneInput d;
  d.id = pose.id;
  d.pos_t = pose.pos_t;
  d.dvec = geo::camera_axis(pose, k);
  d.dnorm_sq = d.dvec.squaredNorm();
  d.cos_lat = std::cos(geo::deg_to_rad(pose.pos_t.lat));
  d.theta_rad = pose.camera.half_angle_rad;
  validate(d);
  return d;
}

void validate(const DroneInput& d) {
  geo::validate(d.pos_t);
  if (!(d.cos_lat > 0.0 && d.cos_lat <= 1.0)) throw geo::DomainError("drone '" + d.id + "': cos_lat outside (0, 1]");
  if (!(d.dnorm_sq > 0.0) || !d.dvec.allFinite()) {
    throw geo::DomainError("drone '" + d.id + "': zero-length direction");
  }
  if (!(d.theta_rad > 0.0 && d.theta_rad <= std::numbers::pi)) {
    throw geo::DomainError("drone '" + d.id + "': half-angle outside (0, pi]");
  }
}

MaskSet make_masks(mpc::Prg& rng, std::size_t n) {
  MaskSet out(n);
  for (auto& m : out) {
    m.lat = static_cast<std::uint32_t>(rng.uniform(1, kMaskLimit));
    m.lon = static_cast<std::uint32_t>(rng.uniform(1, kMaskLimit));
  }
  return out;
}

MaskSet identity_masks(std::size_t n) { return MaskSet(n); }

void validate(const CitizenInput& c, std::size_t n, const geo::GeometryConstants& k) {
  geo::validate(c.pos);
  const double limit = max_vicinity_deg(k);
  for (const double v : {c.lat_vicinity_deg, c.lon_vicinity_deg}) {
    if (!(v > 0.0)) throw geo::DomainError("vicinity thresholds must be positive");
    if (v > limit) {
      throw geo::DomainError("vicinity threshold " + std::to_string(v) + " deg exceeds the supported " +
                             std::to_string(limit) + " deg");
    }
  }
  validate_masks(c.masks, n, "citizen");
}

mpc::DealerStream make_dealer(const SessionParams& params) {
  return mpc::DealerStream(mpc::Prg(params.dealer_seed, "privadome/dealer/" + hex(params.session_id)));
}

mpc::PlanInputs citizen_plan_inputs(const CitizenInput& c, bool vicinity, bool fov,
                                    const geo::GeometryConstants& k) {
  mpc::PlanInputs in;
  auto one = [](RingElement v) { return RingVector::Constant(1, v); };
  if (vicinity) {
    const std::int64_t lat_vic = quantize(c.lat_vicinity_deg, kDegreeScale);
    const std::int64_t lon_vic = quantize(c.lon_vicinity_deg, kDegreeScale);
    in["lat_c"] = one(ring(quantize(c.pos.lat, kDegreeScale)));
    in["lon_c"] = one(ring(quantize(c.pos.lon, kDegreeScale)));
    in["lat_vic_sq"] = one(ring(mpc::SignedRing(lat_vic) * lat_vic));
    in["lon_vic_sq"] = one(ring(mpc::SignedRing(lon_vic) * lon_vic));
    in["mask_lat_c"] = mask_vector(c.masks, true);
    in["mask_lon_c"] = mask_vector(c.masks, false);
  }
  if (fov) {
    const double km = k.meters_per_degree();
    in["x_arc_c"] = one(ring(quantize(km * c.pos.lon, kArcScale)));
    in["y_arc_c"] = one(ring(quantize(km * c.pos.lat, kArcScale)));
  }
  return in;
}

mpc::PlanInputs authority_plan_inputs(std::span<const DroneInput> drones, const MaskSet& masks,
                                      bool vicinity, bool fov, const geo::GeometryConstants& k) {
  const auto n = static_cast<Eigen::Index>(drones.size());
  mpc::PlanInputs in;
  if (vicinity) {
    validate_masks(masks, drones.size(), "authority");
    RingVector lat(n), lon(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const DroneInput& d = drones[static_cast<std::size_t>(i)];
      lat(i) = ring(quantize(d.pos_t.lat, kDegreeScale));
      lon(i) = ring(quantize(d.pos_t.lon, kDegreeScale));
    }
    in["lat_t"] = lat;
    in["lon_t"] = lon;
    in["mask_lat_a"] = mask_vector(masks, true);
    in["mask_lon_a"] = mask_vector(masks, false);
  }
  if (fov) {
    const double km = k.meters_per_degree();
    RingVector x_arc(n), y_arc(n), dx_cos(n), dy(n), cos_sq(n), dnorm(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const DroneInput& d = drones[static_cast<std::size_t>(i)];
      validate(d);
      // Only the direction of D matters; a unit axis keeps the precision budget independent of speed.
      const geo::PlanarVector u = d.dvec / std::sqrt(d.dnorm_sq);
      const std::int64_t qx = quantize(u.x(), kAxisScale);
      const std::int64_t qy = quantize(u.y(), kAxisScale);
      const std::int64_t qc = quantize(d.cos_lat, kCosScale);
      x_arc(i) = ring(quantize(km * d.pos_t.lon, kArcScale));
      y_arc(i) = ring(quantize(km * d.pos_t.lat, kArcScale));
      dx_cos(i) = ring(qx * qc);
      dy(i) = ring(qy);
      cos_sq(i) = ring(qc * qc);
      dnorm(i) = ring(qx * qx + qy * qy);
    }
    in["x_arc_t"] = x_arc;
    in["y_arc_t"] = y_arc;
    in["dx_cos"] = dx_cos;
    in["dy"] = dy;
    in["cos_sq"] = cos_sq;
    in["dnorm_sq"] = dnorm;
  }
  return in;
}

std::vector<ShortlistRecord> citizen_session(mpc::Endpoint& ep, mpc::Prg& rng,
                                             const SessionParams& params, const CitizenInput& input,
                                             std::span<const std::string> ids) {
  if (ep.role() != PartyRole::Citizen) throw mpc::ProtocolError("citizen_session: wrong endpoint role");
  const std::size_t n = params.n;
  if (ids.size() != n) throw mpc::ProtocolError("citizen_session: id list does not match n");
  validate(input, n);

  mpc::DealerStream dealer = make_dealer(params);
  mpc::PartyEngine engine(ep, rng);
  std::vector<ShortlistRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) records[i].id = ids[i];

  if (params.variant == Variant::Oblivious) {
    const mpc::CircuitPlan plan = build_oblivious_plan(n);
    mpc::TripleStore triples = draw_triples(dealer, ep, plan.mul_count());
    const mpc::PlanOutputs out = engine.evaluate(plan, citizen_plan_inputs(input, true, true), triples);
    for (std::size_t i = 0; i < n; ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      records[i].nearby_lat = out.at("nearby_lat").at(e);
      records[i].nearby_lon = out.at("nearby_lon").at(e);
      records[i].dotp = out.at("dotp").at(e);
      records[i].norm_sq = out.at("norm_sq").at(e);
    }
    return records;
  }

  const mpc::CircuitPlan vicinity = build_vicinity_plan(n);
  mpc::TripleStore t1 = draw_triples(dealer, ep, vicinity.mul_count());
  const mpc::PlanOutputs out1 = engine.evaluate(vicinity, citizen_plan_inputs(input, true, false), t1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    records[i].nearby_lat = out1.at("nearby_lat").at(e);
    records[i].nearby_lon = out1.at("nearby_lon").at(e);
  }
  const std::vector<std::size_t> selected = nearby_indices(out1, n);
  if (selected.empty()) return records;

  const mpc::CircuitPlan fov = build_fov_plan(selected.size());
  mpc::TripleStore t2 = draw_triples(dealer, ep, fov.mul_count());
  const mpc::PlanOutputs out2 = engine.evaluate(fov, citizen_plan_inputs(input, false, true), t2);
  for (std::size_t j = 0; j < selected.size(); ++j) {
    const auto e = static_cast<Eigen::Index>(j);
    records[selected[j]].dotp = out2.at("dotp").at(e);
    records[selected[j]].norm_sq = out2.at("norm_sq").at(e);
  }
  return records;
}

std::vector<std::size_t> authority_session(mpc::Endpoint& ep, mpc::Prg& rng,
                                           const SessionParams& params,
                                           std::span<const DroneInput> drones,
                                           const MaskSet& masks) {
  if (ep.role() != PartyRole::Authority) throw mpc::ProtocolError("authority_session: wrong endpoint role");
  const std::size_t n = params.n;
  if (drones.size() != n) throw mpc::ProtocolError("authority_session: fleet size does not match n");

  mpc::DealerStream dealer = make_dealer(params);
  mpc::PartyEngine engine(ep, rng);

  if (params.variant == Variant::Oblivious) {
    const mpc::CircuitPlan plan = build_oblivious_plan(n);
    mpc::TripleStore triples = draw_triples(dealer, ep, plan.mul_count());
    engine.evaluate(plan, authority_plan_inputs(drones, masks, true, true), triples);
    return {};
  }

  const mpc::CircuitPlan vicinity = build_vicinity_plan(n);
  mpc::TripleStore t1 = draw_triples(dealer, ep, vicinity.mul_count());
  const mpc::PlanOutputs out1 = engine.evaluate(vicinity, authority_plan_inputs(drones, masks, true, false), t1);
  const std::vector<std::size_t> selected = nearby_indices(out1, n);
  if (selected.empty()) return selected;

  std::vector<DroneInput> chosen;
  chosen.reserve(selected.size());
  for (const std::size_t i : selected) chosen.push_back(drones[i]);
  const mpc::CircuitPlan fov = build_fov_plan(selected.size());
  mpc::TripleStore t2 = draw_triples(dealer, ep, fov.mul_count());
  engine.evaluate(fov, authority_plan_inputs(chosen, {}, false, true), t2);
  return selected;
}

bool is_nearby(const mpc::FixedPoint& nearby_lat, const mpc::FixedPoint& nearby_lon) {
  return mpc::to_signed(nearby_lat.raw) <= 0 && mpc::to_signed(nearby_lon.raw) <= 0;
}

std::vector<ShortlistDecision> citizen_postprocess(std::span<const ShortlistRecord> records,
                                                   std::span<const double> thetas_rad) {
  if (records.size() != thetas_rad.size()) {
    throw geo::DomainError("citizen_postprocess: " + std::to_string(records.size()) + " records but " +
                           std::to_string(thetas_rad.size()) + " thetas");
  }
  std::vector<ShortlistDecision> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ShortlistRecord& r = records[i];
    ShortlistDecision d;
    d.id = r.id;
    d.in_vicinity = is_nearby(r.nearby_lat, r.nearby_lon);
    if (d.in_vicinity) {
      if (!r.dotp || !r.norm_sq) throw mpc::ProtocolError("record '" + r.id + "' lacks dotp/norm_sq");
      const long double norm = mpc::fx_decode_long(*r.norm_sq);
      if (norm <= 0) {
        d.invalid = true;
      } else {
        long double c = mpc::fx_decode_long(*r.dotp) / std::sqrt(norm);
        c = std::clamp(c, -1.0L, 1.0L);
        d.phi_rad = static_cast<double>(std::acos(c));
        d.shortlisted = *d.phi_rad <= thetas_rad[i];
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

RunResult run_protocol(const CitizenInput& citizen, std::span<const DroneInput> drones,
                       const MaskSet& authority_masks, const SessionParams& params,
                       std::uint64_t party_seed) {
  std::vector<std::string> ids;
  std::vector<double> thetas;
  for (const auto& d : drones) {
    ids.push_back(d.id);
    thetas.push_back(d.theta_rad);
  }
  RunResult result;
  mpc::run_two_party(
      [&](mpc::Channel& ch) {
        mpc::Endpoint ep(PartyRole::Citizen, ch, result.citizen_transcript);
        mpc::Prg rng(party_seed, "citizen");
        result.records = citizen_session(ep, rng, params, citizen, ids);
      },
      [&](mpc::Channel& ch) {
        mpc::Endpoint ep(PartyRole::Authority, ch, result.authority_transcript);
        mpc::Prg rng(party_seed, "authority");
        result.authority_learned = authority_session(ep, rng, params, drones, authority_masks);
      });
  result.decisions = citizen_postprocess(result.records, thetas);
  return result;
}

RunResult run_oblivious(const CitizenInput& citizen, std::span<const DroneInput> drones,
                        const MaskSet& authority_masks, const SessionParams& params,
                        std::uint64_t party_seed) {
  SessionParams p = params;
  p.variant = Variant::Oblivious;
  return run_protocol(citizen, drones, authority_masks, p, party_seed);
}

RunResult run_non_oblivious_variant(const CitizenInput& citizen,
                                    std::span<const DroneInput> drones,
                                    const MaskSet& authority_masks, const SessionParams& params,
                                    std::uint64_t party_seed) {
  SessionParams p = params;
  p.variant = Variant::NonOblivious;
  return run_protocol(citizen, drones, authority_masks, p, party_seed);
}

}  // namespace privadome::shortlist
