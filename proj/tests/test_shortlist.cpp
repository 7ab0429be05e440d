#include "privadome/geometry.hpp"
#include "privadome/shortlist/encoding.hpp"
#include "privadome/shortlist/shortlist.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace privadome;
using namespace privadome::shortlist;

namespace {

constexpr double kPi = std::numbers::pi;

geo::DronePose pose(std::string id, geo::GeoCoord t, geo::GeoCoord t2, double theta_rad) {
  geo::DronePose p;
  p.id = std::move(id);
  p.pos_t = t;
  p.pos_t_delta = t2;
  p.camera = geo::CameraSpec::from_half_angle(theta_rad);
  return p;
}

SessionParams params_for(std::size_t n, Variant v, std::uint64_t seed = 1) {
  SessionParams p;
  p.n = n;
  p.variant = v;
  p.session_id.fill(static_cast<std::uint8_t>(seed));
  p.dealer_seed = seed;
  return p;
}

struct Scenario {
  CitizenInput citizen;
  std::vector<geo::DronePose> poses;
  std::vector<DroneInput> drones;
  MaskSet masks;
};

/// n drones around a citizen; `inside` of them within the vicinity box.
Scenario random_scenario(mpc::Prg& rng, std::size_t n, std::size_t inside, double vic_deg) {
  Scenario s;
  s.citizen.pos = {rng.uniform_real(-60, 60), rng.uniform_real(-170, 170)};
  s.citizen.lat_vicinity_deg = vic_deg;
  s.citizen.lon_vicinity_deg = vic_deg;
  for (std::size_t i = 0; i < n; ++i) {
    geo::GeoCoord t;
    if (i < inside) {
      t = {s.citizen.pos.lat + rng.uniform_real(-0.9, 0.9) * vic_deg,
           s.citizen.pos.lon + rng.uniform_real(-0.9, 0.9) * vic_deg};
    } else {
      const double sign = rng.uniform(0, 2) ? 1.0 : -1.0;
      t = {s.citizen.pos.lat + sign * rng.uniform_real(1.2, 3.0) * vic_deg,
           s.citizen.pos.lon + rng.uniform_real(-2.0, 2.0) * vic_deg};
    }
    const double heading = rng.uniform_real(0, 2 * kPi);
    const geo::GeoCoord t2{t.lat + 1e-4 * std::cos(heading), t.lon + 1e-4 * std::sin(heading)};
    s.poses.push_back(pose("d" + std::to_string(i), t, t2, rng.uniform_real(0.3, 0.8)));
    s.drones.push_back(derive_drone_input(s.poses.back()));
  }
  s.citizen.masks = make_masks(rng, n);
  s.masks = make_masks(rng, n);
  return s;
}

bool oracle_vicinity(const Scenario& s, std::size_t i) {
  return geo::in_vicinity(s.citizen.pos, s.poses[i].pos_t,
                          geo::ThresholdVicinity{s.citizen.lat_vicinity_deg, s.citizen.lon_vicinity_deg});
}

}  // namespace

TEST_CASE("variant names") {
  CHECK(to_string(Variant::Oblivious) == "oblivious");
  CHECK(to_string(Variant::NonOblivious) == "non-oblivious");
  CHECK(variant_from_string("non-oblivious") == Variant::NonOblivious);
  CHECK_FALSE(variant_from_string("both").has_value());
}

TEST_CASE("quantize") {
  CHECK(quantize(1.0, 4) == 16);
  CHECK(quantize(-0.03125, 4) == -1);
  CHECK(quantize(0.5 / 16, 4) == 1);
  CHECK_THROWS(quantize(1.0, 63));
  CHECK(max_vicinity_deg() == doctest::Approx(0.1473).epsilon(1e-3));
}

TEST_CASE("masks") {
  mpc::Prg rng(1, "masks");
  const MaskSet m = make_masks(rng, 10'000);
  REQUIRE(m.size() == 10'000);
  for (const auto& p : m) {
    CHECK(p.lat >= 1);
    CHECK(p.lat < kMaskLimit);
    CHECK(p.lon >= 1);
    CHECK(p.lon < kMaskLimit);
  }
  for (const auto& p : identity_masks(5)) CHECK(p == MaskPair{1, 1});
}

TEST_CASE("plan size is linear in n and independent of inputs") {
  const auto m1 = build_oblivious_plan(1).mul_count();
  for (std::size_t n : {2u, 7u, 50u}) {
    CHECK(build_oblivious_plan(n).mul_count() == n * m1);
    CHECK(build_oblivious_plan(n).depth() == build_oblivious_plan(1).depth());
  }
  CHECK(build_oblivious_plan(9).serialize() == build_oblivious_plan(9).serialize());
  CHECK(build_vicinity_plan(4).mul_count() + build_fov_plan(4).mul_count() >= build_oblivious_plan(4).mul_count());
}

TEST_CASE("collinear drone: in view, phi ~ 0") {
  const geo::GeoCoord c{40.0, -73.0};
  const auto p = pose("a", {39.999, -73.0}, {39.9995, -73.0}, 0.5);
  CitizenInput ci{c, 0.05, 0.05, identity_masks(1)};
  const std::vector<DroneInput> d = {derive_drone_input(p)};
  const RunResult r = run_oblivious(ci, d, identity_masks(1), params_for(1, Variant::Oblivious));
  REQUIRE(r.decisions.size() == 1);
  CHECK(r.decisions[0].in_vicinity);
  REQUIRE(r.decisions[0].phi_rad);
  CHECK(*r.decisions[0].phi_rad < 1e-3);
  CHECK(r.decisions[0].shortlisted);
}

TEST_CASE("drone behind the citizen: phi ~ pi") {
  const geo::GeoCoord c{40.0, -73.0};
  const auto p = pose("a", {39.999, -73.0}, {39.9985, -73.0}, 0.5);
  CitizenInput ci{c, 0.05, 0.05, identity_masks(1)};
  const std::vector<DroneInput> d = {derive_drone_input(p)};
  const RunResult r = run_oblivious(ci, d, identity_masks(1), params_for(1, Variant::Oblivious));
  REQUIRE(r.decisions[0].phi_rad);
  CHECK(*r.decisions[0].phi_rad == doctest::Approx(kPi).epsilon(1e-3));
  CHECK_FALSE(r.decisions[0].shortlisted);
}

TEST_CASE("outside vicinity: never shortlisted, no angle") {
  const geo::GeoCoord c{10.0, 20.0};
  const auto p = pose("far", {10.2, 20.0}, {10.19, 20.0}, 0.7);
  CitizenInput ci{c, 0.05, 0.05, identity_masks(1)};
  const std::vector<DroneInput> d = {derive_drone_input(p)};
  for (Variant v : {Variant::Oblivious, Variant::NonOblivious}) {
    const RunResult r = run_protocol(ci, d, identity_masks(1), params_for(1, v));
    CHECK_FALSE(r.decisions[0].in_vicinity);
    CHECK_FALSE(r.decisions[0].phi_rad);
    CHECK_FALSE(r.decisions[0].shortlisted);
  }
}

TEST_CASE("random fleets match the plaintext oracle") {
  mpc::Prg rng(2, "random-fleets");
  for (int trial = 0; trial < 10; ++trial) {
    const Scenario s = random_scenario(rng, 8, 5, 0.05);
    const RunResult r = run_oblivious(s.citizen, s.drones, s.masks, params_for(8, Variant::Oblivious, trial));
    REQUIRE(r.decisions.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(r.records[i].id == s.poses[i].id);
      CHECK(r.decisions[i].id == s.poses[i].id);
      CHECK(r.decisions[i].in_vicinity == oracle_vicinity(s, i));
      if (r.decisions[i].in_vicinity) {
        REQUIRE(r.decisions[i].phi_rad);
        CHECK(std::abs(*r.decisions[i].phi_rad - geo::field_of_view_angle(s.citizen.pos, s.poses[i])) < 1e-3);
      }
    }
    CHECK(r.authority_learned.empty());
  }
}

TEST_CASE("masks preserve the sign of the vicinity test") {
  mpc::Prg rng(3, "sign");
  const Scenario s = random_scenario(rng, 12, 6, 0.08);
  const RunResult masked = run_oblivious(s.citizen, s.drones, s.masks, params_for(12, Variant::Oblivious));
  const RunResult plain =
      run_oblivious(CitizenInput{s.citizen.pos, 0.08, 0.08, identity_masks(12)}, s.drones, identity_masks(12),
                    params_for(12, Variant::Oblivious));
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(masked.decisions[i].in_vicinity == plain.decisions[i].in_vicinity);
    const auto sign = [](const mpc::FixedPoint& f) { return mpc::to_signed(f.raw) >= 0; };
    CHECK(sign(masked.records[i].nearby_lat) == sign(plain.records[i].nearby_lat));
    CHECK(sign(masked.records[i].nearby_lon) == sign(plain.records[i].nearby_lon));
  }
}

TEST_CASE("postprocess") {
  auto rec = [](double dot, double norm) {
    ShortlistRecord r;
    r.id = "x";
    r.nearby_lat = mpc::fx_encode(-1.0, 0);
    r.nearby_lon = mpc::fx_encode(-1.0, 0);
    r.dotp = mpc::fx_encode(dot, 20);
    r.norm_sq = mpc::fx_encode(norm, 40);
    return r;
  };
  const std::vector<ShortlistRecord> rs = {rec(1.0, 1.0), rec(0.0, 1.0), rec(-2.0, 4.0), rec(0.0, 0.0)};
  const std::vector<double> thetas = {0.1, kPi / 2, 1.0, 1.0};
  const auto d = citizen_postprocess(rs, thetas);
  CHECK(*d[0].phi_rad == doctest::Approx(0.0));
  CHECK(d[0].shortlisted);
  CHECK(*d[1].phi_rad == doctest::Approx(kPi / 2));
  CHECK(d[1].shortlisted);  // inclusive boundary
  CHECK(*d[2].phi_rad == doctest::Approx(kPi));
  CHECK_FALSE(d[2].shortlisted);
  CHECK(d[3].in_vicinity);
  CHECK(d[3].invalid);
  CHECK_FALSE(d[3].phi_rad);
  CHECK_FALSE(d[3].shortlisted);

  ShortlistRecord missing = rec(1.0, 1.0);
  missing.dotp.reset();
  CHECK_THROWS(citizen_postprocess(std::span(&missing, 1), std::span(thetas.data(), 1)));
}

TEST_CASE("non-oblivious variant: same decisions, cost grows with k") {
  mpc::Prg rng(4, "non-oblivious");
  std::size_t prev = 0;
  std::size_t oblivious_bytes = 0;
  for (std::size_t inside : {0u, 1u, 3u, 6u}) {
    const Scenario s = random_scenario(rng, 20, inside, 0.05);
    const RunResult obl = run_oblivious(s.citizen, s.drones, s.masks, params_for(20, Variant::Oblivious));
    const RunResult non =
        run_non_oblivious_variant(s.citizen, s.drones, s.masks, params_for(20, Variant::NonOblivious));
    CHECK(non.decisions.size() == obl.decisions.size());
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(non.decisions[i].in_vicinity == obl.decisions[i].in_vicinity);
      CHECK(non.decisions[i].shortlisted == obl.decisions[i].shortlisted);
    }
    CHECK(non.authority_learned.size() == inside);
    const std::size_t bytes = non.citizen_transcript.online_total();
    if (inside == 0) CHECK(bytes < obl.citizen_transcript.online_total());
    CHECK(bytes >= prev);
    prev = bytes;
    if (oblivious_bytes) CHECK(obl.citizen_transcript.online_total() == oblivious_bytes);
    oblivious_bytes = obl.citizen_transcript.online_total();
  }
}

TEST_CASE("oblivious: nothing is revealed to the authority") {
  mpc::Prg rng(5, "leak");
  const Scenario s = random_scenario(rng, 6, 3, 0.05);
  const RunResult r = run_oblivious(s.citizen, s.drones, s.masks, params_for(6, Variant::Oblivious));
  CHECK(r.authority_transcript.fragments(mpc::Direction::CitizenToAuthority, mpc::MsgType::Reveal) == 0);
  CHECK(r.authority_transcript.fragments(mpc::Direction::AuthorityToCitizen, mpc::MsgType::Reveal) > 0);
  CHECK(r.citizen_transcript.rounds() == r.authority_transcript.rounds());
}

TEST_CASE("validation") {
  mpc::Prg rng(6, "validation");
  const Scenario s = random_scenario(rng, 3, 3, 0.05);
  CHECK_NOTHROW(validate(s.citizen, 3));
  CHECK_THROWS(validate(s.citizen, 4));
  CitizenInput big = s.citizen;
  big.lat_vicinity_deg = 1.0;
  CHECK_THROWS(validate(big, 3));
  CitizenInput zero = s.citizen;
  zero.masks[0].lat = 0;
  CHECK_THROWS(validate(zero, 3));
  DroneInput bad = s.drones[0];
  bad.theta_rad = 0;
  CHECK_THROWS(validate(bad));
}
