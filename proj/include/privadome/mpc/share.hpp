#pragma once

#include "privadome/mpc/prg.hpp"
#include "privadome/mpc/ring.hpp"

#include <string_view>
#include <utility>

namespace privadome::mpc {

enum class PartyRole : std::uint8_t { Citizen = 0, Authority = 1 };

inline PartyRole peer_of(PartyRole r) {
  return r == PartyRole::Citizen ? PartyRole::Authority : PartyRole::Citizen;
}

std::string_view to_string(PartyRole r);

/// One party's additive fragment of a fixed-point secret.
struct Share {
  PartyRole party = PartyRole::Citizen;
  RingElement fragment = 0;
  int scale_exp = 0;
};

/// One party's fragments of a batch of secrets sharing one scale exponent.
struct SharedVector {
  PartyRole party = PartyRole::Citizen;
  RingVector fragments;
  int scale_exp = 0;

  [[nodiscard]] Eigen::Index size() const { return fragments.size(); }
};

/// Splits `value`: the citizen fragment is uniform, the authority fragment is raw minus it.
std::pair<Share, Share> share(const FixedPoint& value, Prg& rng);
std::pair<SharedVector, SharedVector> share(const RingVector& raw, int scale_exp, Prg& rng);

FixedPoint reconstruct(const Share& a, const Share& b);
RingVector reconstruct(const SharedVector& a, const SharedVector& b);

// Local operations: no communication. Scale exponents must match for add/sub.
Share add(const Share& x, const Share& y);
Share sub(const Share& x, const Share& y);
/// Multiplies by a public fixed-point constant; the result scale is the sum of scales.
Share mul_public(const Share& x, const FixedPoint& c);
/// Adds a public constant of the same scale (applied by the citizen fragment only).
Share add_public(const Share& x, const FixedPoint& c);

SharedVector add(const SharedVector& x, const SharedVector& y);
SharedVector sub(const SharedVector& x, const SharedVector& y);
SharedVector mul_public(const SharedVector& x, const FixedPoint& c);
SharedVector add_public(const SharedVector& x, const FixedPoint& c);

/// Repeats a single-element vector to `width`; other sizes must already equal `width`.
RingVector broadcast(const RingVector& v, Eigen::Index width);

}  // namespace privadome::mpc
