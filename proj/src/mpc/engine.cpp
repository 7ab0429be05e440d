#include "privadome/mpc/engine.hpp"

#include <exception>
#include <thread>

namespace privadome::mpc {
namespace {

void append_vector(std::vector<std::uint8_t>& out, const RingVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) append_fragment(out, v(i));
}

RingVector slice(const RingVector& v, std::size_t& offset, std::size_t count) {
  if (offset + count > static_cast<std::size_t>(v.size())) {
    throw ProtocolError("peer message shorter than the plan requires");
  }
  RingVector out = v.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(count));
  offset += count;
  return out;
}

}  // namespace

std::vector<std::uint8_t> PartyEngine::exchange(MsgType type, const std::vector<std::uint8_t>& mine) {
  if (role() == PartyRole::Citizen) {
    ep_.send(type, mine);
    return ep_.recv(type).payload;
  }
  std::vector<std::uint8_t> theirs = ep_.recv(type).payload;
  ep_.send(type, mine);
  return theirs;
}

std::pair<std::vector<SharedVector>, std::vector<SharedVector>> PartyEngine::share_inputs(
    std::span<const std::pair<RingVector, int>> own, std::span<const std::pair<std::size_t, int>> peer) {
  ep_.transcript().begin_round();
  const PartyRole me = role();
  std::vector<SharedVector> mine;
  std::vector<std::uint8_t> outgoing;
  for (const auto& [raw, scale] : own) {
    auto [c, a] = share(raw, scale, rng_);
    SharedVector& keep = me == PartyRole::Citizen ? c : a;
    const SharedVector& give = me == PartyRole::Citizen ? a : c;
    append_vector(outgoing, give.fragments);
    mine.push_back(std::move(keep));
  }
  const RingVector incoming = deserialize_fragments(exchange(MsgType::InputShareBatch, outgoing));
  std::vector<SharedVector> theirs;
  std::size_t offset = 0;
  for (const auto& [width, scale] : peer) {
    theirs.push_back({me, slice(incoming, offset, width), scale});
  }
  if (offset != static_cast<std::size_t>(incoming.size())) {
    throw ProtocolError("peer sent more input fragments than the plan declares");
  }
  return {std::move(mine), std::move(theirs)};
}

std::vector<SharedVector> PartyEngine::mul(
    std::span<const std::pair<SharedVector, SharedVector>> pairs, TripleStore& triples) {
  std::size_t total = 0;
  for (const auto& [x, y] : pairs) total += static_cast<std::size_t>(std::max(x.size(), y.size()));
  const std::vector<std::size_t> ids = triples.next_ids(total);
  return mul(pairs, triples, ids);
}

std::vector<SharedVector> PartyEngine::mul(
    std::span<const std::pair<SharedVector, SharedVector>> pairs, TripleStore& triples,
    std::span<const std::size_t> triple_ids) {
  Eigen::Index total = 0;
  for (const auto& [x, y] : pairs) total += std::max(x.size(), y.size());
  if (static_cast<std::size_t>(total) != triple_ids.size()) {
    throw ProtocolError("mul: triple count does not match batch size");
  }
  if (triples.party() != role()) throw ProtocolError("mul: triple store belongs to the other party");

  RingVector x(total), y(total);
  Eigen::Index off = 0;
  for (const auto& [xs, ys] : pairs) {
    if (xs.party != role() || ys.party != role()) throw ProtocolError("mul: foreign fragments");
    const Eigen::Index w = std::max(xs.size(), ys.size());
    x.segment(off, w) = broadcast(xs.fragments, w);
    y.segment(off, w) = broadcast(ys.fragments, w);
    off += w;
  }

  RingVector a, b, c;
  triples.consume(triple_ids, a, b, c);

  ep_.transcript().begin_round();
  RingVector de(2 * total);
  de.head(total) = x - a;
  de.tail(total) = y - b;
  const RingVector peer = deserialize_fragments(exchange(MsgType::MulRound, serialize_fragments(de)));
  if (peer.size() != de.size()) throw ProtocolError("MUL_ROUND: unexpected fragment count");
  const RingVector opened = de + peer;
  const auto d = opened.head(total);
  const auto e = opened.tail(total);

  RingVector z = c + d * b + e * a;
  if (role() == PartyRole::Citizen) z += d * e;

  std::vector<SharedVector> out;
  out.reserve(pairs.size());
  off = 0;
  for (const auto& [xs, ys] : pairs) {
    const Eigen::Index w = std::max(xs.size(), ys.size());
    out.push_back({role(), z.segment(off, w), xs.scale_exp + ys.scale_exp});
    off += w;
  }
  return out;
}

std::optional<RingVector> PartyEngine::reveal_to(const SharedVector& x, PartyRole recipient) {
  ep_.transcript().begin_round();
  if (role() == recipient) {
    const RingVector peer = deserialize_fragments(ep_.recv(MsgType::Reveal).payload);
    if (peer.size() != x.size()) throw ProtocolError("REVEAL: unexpected fragment count");
    return RingVector(x.fragments + peer);
  }
  ep_.send(MsgType::Reveal, serialize_fragments(x.fragments));
  return std::nullopt;
}

RingVector PartyEngine::open(const SharedVector& x) {
  ep_.transcript().begin_round();
  const RingVector peer = deserialize_fragments(exchange(MsgType::Reveal, serialize_fragments(x.fragments)));
  if (peer.size() != x.size()) throw ProtocolError("REVEAL: unexpected fragment count");
  return x.fragments + peer;
}

PlanOutputs PartyEngine::evaluate(const CircuitPlan& plan, const PlanInputs& own_inputs,
                                  TripleStore& triples) {
  const PartyRole me = role();
  const auto& gates = plan.gates();
  std::vector<SharedVector> wires(gates.size());

  // Input round.
  std::vector<std::pair<RingVector, int>> own;
  std::vector<std::pair<std::size_t, int>> peer;
  const std::vector<WireId> own_ids = plan.inputs_of(me);
  const std::vector<WireId> peer_ids = plan.inputs_of(peer_of(me));
  for (const WireId w : own_ids) {
    const auto it = own_inputs.find(gates[w].label);
    if (it == own_inputs.end()) throw ProtocolError("missing input '" + gates[w].label + "'");
    if (static_cast<std::size_t>(it->second.size()) != plan.wire(w).width) {
      throw ProtocolError("input '" + gates[w].label + "' has the wrong width");
    }
    own.emplace_back(it->second, plan.wire(w).scale_exp);
  }
  for (const WireId w : peer_ids) peer.emplace_back(plan.wire(w).width, plan.wire(w).scale_exp);
  auto [mine, theirs] = share_inputs(own, peer);
  for (std::size_t i = 0; i < own_ids.size(); ++i) wires[own_ids[i]] = std::move(mine[i]);
  for (std::size_t i = 0; i < peer_ids.size(); ++i) wires[peer_ids[i]] = std::move(theirs[i]);

  auto eval_local = [&](WireId id) {
    const Gate& g = gates[id];
    switch (g.op) {
      case GateOp::Add: wires[id] = add(wires[g.lhs], wires[g.rhs]); break;
      case GateOp::Sub: wires[id] = sub(wires[g.lhs], wires[g.rhs]); break;
      case GateOp::MulPublic: wires[id] = mul_public(wires[g.lhs], g.constant); break;
      case GateOp::AddPublic: wires[id] = add_public(wires[g.lhs], g.constant); break;
      case GateOp::Input:
      case GateOp::Mul: break;
    }
  };

  for (std::uint32_t layer = 0; layer <= plan.depth(); ++layer) {
    if (layer > 0) {
      std::vector<WireId> ids;
      std::vector<std::pair<SharedVector, SharedVector>> batch;
      for (WireId id = 0; id < gates.size(); ++id) {
        if (gates[id].op == GateOp::Mul && plan.wire(id).layer == layer) {
          ids.push_back(id);
          batch.emplace_back(wires[gates[id].lhs], wires[gates[id].rhs]);
        }
      }
      if (!batch.empty()) {
        std::vector<SharedVector> products = mul(batch, triples);
        for (std::size_t i = 0; i < ids.size(); ++i) wires[ids[i]] = std::move(products[i]);
      }
    }
    for (WireId id = 0; id < gates.size(); ++id) {
      if (gates[id].op != GateOp::Mul && gates[id].op != GateOp::Input &&
          plan.wire(id).layer == layer) {
        eval_local(id);
      }
    }
  }

  // Output round: the citizen's REVEAL (if any) goes first, then the authority's.
  PlanOutputs result;
  if (plan.outputs().empty()) return result;
  ep_.transcript().begin_round();
  auto sends = [](PartyRole who, Recipient r) {
    return r == Recipient::Both || (r == Recipient::Citizen) != (who == PartyRole::Citizen);
  };
  auto payload_of = [&](PartyRole who) {
    std::vector<std::uint8_t> out;
    for (const auto& o : plan.outputs()) {
      if (sends(who, o.recipient)) append_vector(out, wires[o.wire].fragments);
    }
    return out;
  };
  auto absorb = [&](PartyRole sender, const std::vector<std::uint8_t>& bytes) {
    const RingVector peer_frags = deserialize_fragments(bytes);
    std::size_t offset = 0;
    for (const auto& o : plan.outputs()) {
      if (!sends(sender, o.recipient)) continue;
      const SharedVector& w = wires[o.wire];
      result[o.label] = {w.fragments + slice(peer_frags, offset, static_cast<std::size_t>(w.size())),
                         w.scale_exp};
    }
    if (offset != static_cast<std::size_t>(peer_frags.size())) {
      throw ProtocolError("REVEAL: unexpected fragment count");
    }
  };
  auto any_sent_by = [&](PartyRole who) {
    for (const auto& o : plan.outputs()) {
      if (sends(who, o.recipient)) return true;
    }
    return false;
  };
  for (const PartyRole sender : {PartyRole::Citizen, PartyRole::Authority}) {
    if (!any_sent_by(sender)) continue;
    if (sender == me) {
      ep_.send(MsgType::Reveal, payload_of(me));
    } else {
      absorb(sender, ep_.recv(MsgType::Reveal).payload);
    }
  }
  return result;
}

void run_two_party(const std::function<void(Channel&)>& citizen,
                   const std::function<void(Channel&)>& authority) {
  auto [citizen_end, authority_end] = make_memory_channel_pair();
  std::exception_ptr authority_error;
  std::thread peer([&, ch = std::move(authority_end)]() mutable {
    try {
      authority(*ch);
    } catch (...) {
      authority_error = std::current_exception();
    }
    ch->close();
  });
  std::exception_ptr citizen_error;
  try {
    citizen(*citizen_end);
  } catch (...) {
    citizen_error = std::current_exception();
  }
  citizen_end->close();
  peer.join();
  // A "peer closed" failure on one side is usually the echo of a real error on the other.
  auto is_echo = [](const std::exception_ptr& e) {
    try {
      std::rethrow_exception(e);
    } catch (const ProtocolError& pe) {
      return std::string_view(pe.what()).starts_with("peer closed");
    } catch (...) {
      return false;
    }
  };
  if (citizen_error && authority_error && is_echo(citizen_error)) std::rethrow_exception(authority_error);
  if (citizen_error) std::rethrow_exception(citizen_error);
  if (authority_error) std::rethrow_exception(authority_error);
}

}  // namespace privadome::mpc
