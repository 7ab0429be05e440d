#pragma once

#include "privadome/geometry.hpp"
#include "privadome/mpc/channel.hpp"
#include "privadome/mpc/circuit.hpp"
#include "privadome/mpc/engine.hpp"
#include "privadome/mpc/prg.hpp"
#include "privadome/mpc/transcript.hpp"
#include "privadome/shortlist/encoding.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace privadome::shortlist {

enum class Variant : std::uint8_t { Oblivious = 0, NonOblivious = 1 };

std::string_view to_string(Variant v);
std::optional<Variant> variant_from_string(std::string_view s);

/// Authority-side view of one drone, derived from its pose pair.
struct DroneInput {
  std::string id;
  geo::GeoCoord pos_t;
  geo::PlanarVector dvec;  ///< camera axis in meters (gimbal yaw applied)
  double dnorm_sq = 0;     ///< |dvec|^2
  double cos_lat = 1;      ///< cos of pos_t.lat
  double theta_rad = 0;
};

DroneInput derive_drone_input(const geo::DronePose& pose,
                              const geo::GeometryConstants& k = geo::kDefaultConstants);
void validate(const DroneInput& d);

struct MaskPair {
  std::uint32_t lat = 1;
  std::uint32_t lon = 1;
  friend bool operator==(const MaskPair&, const MaskPair&) = default;
};
using MaskSet = std::vector<MaskPair>;

/// Uniform masks in [1, 2^20).
MaskSet make_masks(mpc::Prg& rng, std::size_t n);
/// All-ones masks; the masked outputs then equal the raw differences.
MaskSet identity_masks(std::size_t n);

struct CitizenInput {
  geo::GeoCoord pos;
  double lat_vicinity_deg = 0;
  double lon_vicinity_deg = 0;
  MaskSet masks;
};

void validate(const CitizenInput& c, std::size_t n,
              const geo::GeometryConstants& k = geo::kDefaultConstants);

/// What the citizen learns about drone i. dotp and norm_sq are absent for
/// drones the non-oblivious variant skipped.
struct ShortlistRecord {
  std::string id;
  mpc::FixedPoint nearby_lat;
  mpc::FixedPoint nearby_lon;
  std::optional<mpc::FixedPoint> dotp;
  std::optional<mpc::FixedPoint> norm_sq;
};

struct ShortlistDecision {
  std::string id;
  bool in_vicinity = false;
  std::optional<double> phi_rad;
  bool shortlisted = false;
  /// In vicinity but norm_sq <= 0: the citizen sits on the drone, no angle exists.
  bool invalid = false;
  friend bool operator==(const ShortlistDecision&, const ShortlistDecision&) = default;
};

using SessionId = std::array<std::uint8_t, 16>;

struct SessionParams {
  std::size_t n = 0;
  Variant variant = Variant::Oblivious;
  SessionId session_id{};
  /// Both parties expand their triple halves from this seed.
  std::uint64_t dealer_seed = 0;
};

/// Triple source for one party: its half of the dealer stream for this session.
mpc::DealerStream make_dealer(const SessionParams& params);

// Circuit plans. Labels of inputs and outputs are fixed strings so that the
// party code and the plan cannot drift apart.
mpc::CircuitPlan build_oblivious_plan(std::size_t n);
/// Non-oblivious phase 1: masked vicinity values opened to both parties.
mpc::CircuitPlan build_vicinity_plan(std::size_t n);
/// Non-oblivious phase 2 over the k in-vicinity drones.
mpc::CircuitPlan build_fov_plan(std::size_t k);
/// Oblivious: the whole circuit. Non-oblivious: the phase-1 plan.
mpc::CircuitPlan build_circuit_plan(std::size_t n, Variant variant);

/// Party inputs keyed by plan label.
mpc::PlanInputs citizen_plan_inputs(const CitizenInput& c, bool vicinity, bool fov,
                                    const geo::GeometryConstants& k = geo::kDefaultConstants);
mpc::PlanInputs authority_plan_inputs(std::span<const DroneInput> drones, const MaskSet& masks,
                                      bool vicinity, bool fov,
                                      const geo::GeometryConstants& k = geo::kDefaultConstants);

/// Citizen half of one session. `ids` come from the authority's public list.
std::vector<ShortlistRecord> citizen_session(mpc::Endpoint& ep, mpc::Prg& rng,
                                             const SessionParams& params, const CitizenInput& input,
                                             std::span<const std::string> ids);
/// Authority half. Returns the indices of drones it learned are in vicinity
/// (always empty for the oblivious variant).
std::vector<std::size_t> authority_session(mpc::Endpoint& ep, mpc::Prg& rng,
                                           const SessionParams& params,
                                           std::span<const DroneInput> drones,
                                           const MaskSet& masks);

std::vector<ShortlistDecision> citizen_postprocess(std::span<const ShortlistRecord> records,
                                                   std::span<const double> thetas_rad);

/// Whether a masked vicinity pair marks the drone as nearby.
bool is_nearby(const mpc::FixedPoint& nearby_lat, const mpc::FixedPoint& nearby_lon);

struct RunResult {
  std::vector<ShortlistRecord> records;
  std::vector<ShortlistDecision> decisions;
  mpc::Transcript citizen_transcript;
  mpc::Transcript authority_transcript;
  std::vector<std::size_t> authority_learned;
};

/// In-process run of both parties over a memory channel.
RunResult run_protocol(const CitizenInput& citizen, std::span<const DroneInput> drones,
                       const MaskSet& authority_masks, const SessionParams& params,
                       std::uint64_t party_seed = 0);
RunResult run_oblivious(const CitizenInput& citizen, std::span<const DroneInput> drones,
                        const MaskSet& authority_masks, const SessionParams& params,
                        std::uint64_t party_seed = 0);
RunResult run_non_oblivious_variant(const CitizenInput& citizen,
                                    std::span<const DroneInput> drones,
                                    const MaskSet& authority_masks, const SessionParams& params,
                                    std::uint64_t party_seed = 0);

}  // namespace privadome::shortlist
