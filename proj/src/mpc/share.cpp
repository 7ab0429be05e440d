#include "privadome/mpc/share.hpp"

namespace privadome::mpc {
namespace {

void require_same_scale(int a, int b, const char* op) {
  if (a != b) {
    throw EncodingError(std::string(op) + ": scale mismatch (" + std::to_string(a) + " vs " +
                        std::to_string(b) + ")");
  }
}

void require_same_party(PartyRole a, PartyRole b) {
  if (a != b) throw ProtocolError("cannot combine fragments held by different parties");
}

}  // namespace

std::string_view to_string(PartyRole r) {
  return r == PartyRole::Citizen ? "citizen" : "authority";
}

std::pair<Share, Share> share(const FixedPoint& value, Prg& rng) {
  const RingElement r = rng.next_ring();
  return {Share{PartyRole::Citizen, r, value.scale_exp},
          Share{PartyRole::Authority, value.raw - r, value.scale_exp}};
}

std::pair<SharedVector, SharedVector> share(const RingVector& raw, int scale_exp, Prg& rng) {
  RingVector r = rng.next_ring_vector(raw.size());
  RingVector other = raw - r;
  return {SharedVector{PartyRole::Citizen, std::move(r), scale_exp},
          SharedVector{PartyRole::Authority, std::move(other), scale_exp}};
}

FixedPoint reconstruct(const Share& a, const Share& b) {
  if (a.party == b.party) throw ProtocolError("reconstruct needs one fragment from each party");
  require_same_scale(a.scale_exp, b.scale_exp, "reconstruct");
  return {a.fragment + b.fragment, a.scale_exp};
}

RingVector reconstruct(const SharedVector& a, const SharedVector& b) {
  if (a.party == b.party) throw ProtocolError("reconstruct needs one fragment from each party");
  require_same_scale(a.scale_exp, b.scale_exp, "reconstruct");
  return a.fragments + b.fragments;
}

Share add(const Share& x, const Share& y) {
  require_same_party(x.party, y.party);
  require_same_scale(x.scale_exp, y.scale_exp, "add");
  return {x.party, x.fragment + y.fragment, x.scale_exp};
}

Share sub(const Share& x, const Share& y) {
  require_same_party(x.party, y.party);
  require_same_scale(x.scale_exp, y.scale_exp, "sub");
  return {x.party, x.fragment - y.fragment, x.scale_exp};
}

Share mul_public(const Share& x, const FixedPoint& c) {
  return {x.party, x.fragment * c.raw, x.scale_exp + c.scale_exp};
}

Share add_public(const Share& x, const FixedPoint& c) {
  require_same_scale(x.scale_exp, c.scale_exp, "add_public");
  return {x.party, x.party == PartyRole::Citizen ? x.fragment + c.raw : x.fragment, x.scale_exp};
}

RingVector broadcast(const RingVector& v, Eigen::Index width) {
  if (v.size() == width) return v;
  if (v.size() != 1) throw ProtocolError("broadcast: width mismatch");
  return RingVector::Constant(width, v(0));
}

SharedVector add(const SharedVector& x, const SharedVector& y) {
  require_same_party(x.party, y.party);
  require_same_scale(x.scale_exp, y.scale_exp, "add");
  const Eigen::Index w = std::max(x.size(), y.size());
  return {x.party, broadcast(x.fragments, w) + broadcast(y.fragments, w), x.scale_exp};
}

SharedVector sub(const SharedVector& x, const SharedVector& y) {
  require_same_party(x.party, y.party);
  require_same_scale(x.scale_exp, y.scale_exp, "sub");
  const Eigen::Index w = std::max(x.size(), y.size());
  return {x.party, broadcast(x.fragments, w) - broadcast(y.fragments, w), x.scale_exp};
}

SharedVector mul_public(const SharedVector& x, const FixedPoint& c) {
  return {x.party, x.fragments * c.raw, x.scale_exp + c.scale_exp};
}

SharedVector add_public(const SharedVector& x, const FixedPoint& c) {
  require_same_scale(x.scale_exp, c.scale_exp, "add_public");
  if (x.party == PartyRole::Authority) return x;
  return {x.party, x.fragments + c.raw, x.scale_exp};
}

}  // namespace privadome::mpc
