#include "privadome/mpc/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace privadome::mpc {
namespace {

void check_bound(double bound, int scale_exp, const std::string& what) {
  if (!std::isfinite(bound) || bound < 0) throw PlanError(what + ": invalid bound");
  if (bound == 0) return;
  if (!(std::log2(bound) + scale_exp < kMagnitudeBits)) {
    throw PlanError(what + ": bound 2^" + std::to_string(std::log2(bound) + scale_exp) +
                    " at scale " + std::to_string(scale_exp) + " exceeds 2^126");
  }
}

double constant_magnitude(const FixedPoint& c) {
  return static_cast<double>(std::fabs(fx_decode_long(c)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

void CircuitPlan::check_operand(WireId w) const {
  if (w >= wires_.size()) throw PlanError("unknown wire " + std::to_string(w));
}

std::size_t CircuitPlan::join_width(WireId a, WireId b) const {
  const std::size_t wa = wires_[a].width;
  const std::size_t wb = wires_[b].width;
  if (wa != wb && wa != 1 && wb != 1) {
    throw PlanError("incompatible widths " + std::to_string(wa) + " and " + std::to_string(wb));
  }
  return std::max(wa, wb);
}

WireId CircuitPlan::push(Gate g, WireInfo info) {
  gates_.push_back(std::move(g));
  wires_.push_back(info);
  depth_ = std::max(depth_, info.layer);
  return static_cast<WireId>(wires_.size() - 1);
}

WireId CircuitPlan::input(PartyRole owner, std::string label, std::size_t width, int scale_exp,
                          double bound) {
  if (width == 0) throw PlanError("input '" + label + "' has zero width");
  check_bound(bound, scale_exp, "input '" + label + "'");
  Gate g{GateOp::Input, 0, 0, owner, {}, std::move(label)};
  return push(std::move(g), {scale_exp, bound, width, 0});
}

WireId CircuitPlan::add(WireId a, WireId b) {
  check_operand(a);
  check_operand(b);
  if (wires_[a].scale_exp != wires_[b].scale_exp) throw PlanError("add: scale mismatch");
  const WireInfo info{wires_[a].scale_exp, wires_[a].bound + wires_[b].bound, join_width(a, b),
                      std::max(wires_[a].layer, wires_[b].layer)};
  check_bound(info.bound, info.scale_exp, "add");
  return push({GateOp::Add, a, b, {}, {}, {}}, info);
}

WireId CircuitPlan::sub(WireId a, WireId b) {
  check_operand(a);
  check_operand(b);
  if (wires_[a].scale_exp != wires_[b].scale_exp) throw PlanError("sub: scale mismatch");
  const WireInfo info{wires_[a].scale_exp, wires_[a].bound + wires_[b].bound, join_width(a, b),
                      std::max(wires_[a].layer, wires_[b].layer)};
  check_bound(info.bound, info.scale_exp, "sub");
  return push({GateOp::Sub, a, b, {}, {}, {}}, info);
}

WireId CircuitPlan::mul(WireId a, WireId b) {
  check_operand(a);
  check_operand(b);
  const WireInfo info{wires_[a].scale_exp + wires_[b].scale_exp,
                      wires_[a].bound * wires_[b].bound, join_width(a, b),
                      std::max(wires_[a].layer, wires_[b].layer) + 1};
  check_bound(info.bound, info.scale_exp, "mul");
  return push({GateOp::Mul, a, b, {}, {}, {}}, info);
}

WireId CircuitPlan::mul_public(WireId a, const FixedPoint& c) {
  check_operand(a);
  const WireInfo info{wires_[a].scale_exp + c.scale_exp, wires_[a].bound * constant_magnitude(c),
                      wires_[a].width, wires_[a].layer};
  check_bound(info.bound, info.scale_exp, "mul_public");
  return push({GateOp::MulPublic, a, 0, {}, c, {}}, info);
}

WireId CircuitPlan::add_public(WireId a, const FixedPoint& c) {
  check_operand(a);
  if (wires_[a].scale_exp != c.scale_exp) throw PlanError("add_public: scale mismatch");
  const WireInfo info{wires_[a].scale_exp, wires_[a].bound + constant_magnitude(c),
                      wires_[a].width, wires_[a].layer};
  check_bound(info.bound, info.scale_exp, "add_public");
  return push({GateOp::AddPublic, a, 0, {}, c, {}}, info);
}

void CircuitPlan::assume_bound(WireId w, double bound) {
  check_operand(w);
  check_bound(bound, wires_[w].scale_exp, "assume_bound");
  wires_[w].bound = bound;
}

void CircuitPlan::reveal_to(WireId w, PartyRole recipient, std::string label) {
  check_operand(w);
  outputs_.push_back({w, recipient == PartyRole::Citizen ? Recipient::Citizen : Recipient::Authority,
                      std::move(label)});
}

void CircuitPlan::open(WireId w, std::string label) {
  check_operand(w);
  outputs_.push_back({w, Recipient::Both, std::move(label)});
}

std::size_t CircuitPlan::mul_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    if (gates_[i].op == GateOp::Mul) n += wires_[i].width;
  }
  return n;
}

std::size_t CircuitPlan::mul_count_at(std::uint32_t layer) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    if (gates_[i].op == GateOp::Mul && wires_[i].layer == layer) n += wires_[i].width;
  }
  return n;
}

std::vector<WireId> CircuitPlan::inputs_of(PartyRole party) const {
  std::vector<WireId> out;
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    if (gates_[i].op == GateOp::Input && gates_[i].owner == party) out.push_back(static_cast<WireId>(i));
  }
  return out;
}

std::size_t CircuitPlan::input_fragments(PartyRole party) const {
  std::size_t n = 0;
  for (const WireId w : inputs_of(party)) n += wires_[w].width;
  return n;
}

std::vector<std::uint8_t> CircuitPlan::serialize() const {
  std::vector<std::uint8_t> out;
  put_u64(out, gates_.size());
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const Gate& g = gates_[i];
    const WireInfo& w = wires_[i];
    out.push_back(static_cast<std::uint8_t>(g.op));
    out.push_back(static_cast<std::uint8_t>(g.owner));
    put_u64(out, g.lhs);
    put_u64(out, g.rhs);
    append_fragment(out, g.constant.raw);
    put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(g.constant.scale_exp)));
    put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(w.scale_exp)));
    put_u64(out, std::bit_cast<std::uint64_t>(w.bound));
    put_u64(out, w.width);
    put_u64(out, w.layer);
    put_u64(out, g.label.size());
    out.insert(out.end(), g.label.begin(), g.label.end());
  }
  put_u64(out, outputs_.size());
  for (const auto& o : outputs_) {
    put_u64(out, o.wire);
    out.push_back(static_cast<std::uint8_t>(o.recipient));
    put_u64(out, o.label.size());
    out.insert(out.end(), o.label.begin(), o.label.end());
  }
  return out;
}

}  // namespace privadome::mpc
