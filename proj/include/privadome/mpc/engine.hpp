#pragma once

#include "privadome/mpc/channel.hpp"
#include "privadome/mpc/circuit.hpp"
#include "privadome/mpc/triples.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace privadome::mpc {

/// Raw ring values for this party's input gates, keyed by input label.
using PlanInputs = std::map<std::string, RingVector>;

struct RevealedVector {
  RingVector raw;
  int scale_exp = 0;

  [[nodiscard]] FixedPoint at(Eigen::Index i) const { return {raw(i), scale_exp}; }
};

/// Outputs this party is entitled to see, keyed by output label.
using PlanOutputs = std::map<std::string, RevealedVector>;

/**
 * One party's half of the two-party protocol.
 *
 * Message order is fixed by role so that neither side can deadlock on a full
 * socket: in every exchange the citizen sends first and the authority replies.
 */
class PartyEngine {
 public:
  PartyEngine(Endpoint& endpoint, Prg& rng) : ep_(endpoint), rng_(rng) {}

  [[nodiscard]] PartyRole role() const { return ep_.role(); }

  /// One round: each party sends the peer's fragments of its own inputs.
  /// Returns this party's fragments for `own` followed by `peer_widths` inputs.
  std::pair<std::vector<SharedVector>, std::vector<SharedVector>> share_inputs(
      std::span<const std::pair<RingVector, int>> own,
      std::span<const std::pair<std::size_t, int>> peer);

  /// Beaver multiplication of a batch of pairs in one round. Width-1 operands broadcast.
  std::vector<SharedVector> mul(std::span<const std::pair<SharedVector, SharedVector>> pairs,
                                TripleStore& triples);
  /// Same, consuming the given triple ids in order.
  std::vector<SharedVector> mul(std::span<const std::pair<SharedVector, SharedVector>> pairs,
                                TripleStore& triples, std::span<const std::size_t> triple_ids);

  /// One round: the non-recipient sends its fragments; only the recipient learns the value.
  std::optional<RingVector> reveal_to(const SharedVector& x, PartyRole recipient);
  /// One round: both sides send fragments and both learn the value.
  RingVector open(const SharedVector& x);

  /// Runs every gate of `plan`: input round, one round per multiplicative
  /// layer, one output round.
  PlanOutputs evaluate(const CircuitPlan& plan, const PlanInputs& own_inputs, TripleStore& triples);

 private:
  /// Citizen sends then receives; authority receives then sends.
  std::vector<std::uint8_t> exchange(MsgType type, const std::vector<std::uint8_t>& mine);

  Endpoint& ep_;
  Prg& rng_;
};

/**
 * In-process harness: runs `citizen` and `authority` on two threads connected
 * by a memory channel. The first failure is rethrown after both sides stop.
 */
void run_two_party(const std::function<void(Channel&)>& citizen,
                   const std::function<void(Channel&)>& authority);

}  // namespace privadome::mpc
