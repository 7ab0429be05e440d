#pragma once

#include "privadome/mpc/share.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace privadome::mpc {

class PlanError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using WireId = std::uint32_t;

enum class GateOp : std::uint8_t { Input, Add, Sub, AddPublic, MulPublic, Mul };

struct Gate {
  GateOp op = GateOp::Input;
  WireId lhs = 0;
  WireId rhs = 0;
  PartyRole owner = PartyRole::Citizen;  // Input only
  FixedPoint constant;                   // AddPublic / MulPublic only
  std::string label;
};

/// Static wire facts: public scale exponent, magnitude bound on the decoded
/// value, batch width, and multiplicative depth.
struct WireInfo {
  int scale_exp = 0;
  double bound = 0;
  std::size_t width = 1;
  std::uint32_t layer = 0;
};

enum class Recipient : std::uint8_t { Citizen = 0, Authority = 1, Both = 2 };

struct OutputSpec {
  WireId wire = 0;
  Recipient recipient = Recipient::Citizen;
  std::string label;
};

/**
 * Straight-line arithmetic circuit over batched wires.
 *
 * Every wire carries a batch of `width` values; a width-1 operand broadcasts
 * against a wider one. Gates are appended in topological order. Scales and
 * magnitude bounds are tracked statically, and any wire whose raw magnitude
 * could reach 2^126 is rejected when the gate is added. Nothing is truncated:
 * multiplication adds scale exponents.
 */
class CircuitPlan {
 public:
  WireId input(PartyRole owner, std::string label, std::size_t width, int scale_exp, double bound);
  WireId add(WireId a, WireId b);
  WireId sub(WireId a, WireId b);
  WireId mul(WireId a, WireId b);
  WireId mul_public(WireId a, const FixedPoint& c);
  WireId add_public(WireId a, const FixedPoint& c);

  /// Tightens a wire's bound where the caller's input domain guarantees more
  /// than interval arithmetic can see. Downstream gates use the new bound.
  void assume_bound(WireId w, double bound);

  void reveal_to(WireId w, PartyRole recipient, std::string label);
  void open(WireId w, std::string label);

  [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
  [[nodiscard]] const WireInfo& wire(WireId w) const { return wires_.at(w); }
  [[nodiscard]] const std::vector<OutputSpec>& outputs() const { return outputs_; }
  [[nodiscard]] std::uint32_t depth() const { return depth_; }

  /// Scalar multiplications, i.e. Beaver triples consumed by one evaluation.
  [[nodiscard]] std::size_t mul_count() const;
  [[nodiscard]] std::size_t mul_count_at(std::uint32_t layer) const;
  [[nodiscard]] std::size_t gate_count() const { return gates_.size(); }
  /// Input gates owned by `party`, in plan order.
  [[nodiscard]] std::vector<WireId> inputs_of(PartyRole party) const;
  [[nodiscard]] std::size_t input_fragments(PartyRole party) const;

  /// Deterministic byte encoding of the whole plan.
  [[nodiscard]] std::vector<std::uint8_t> serialize() const;

 private:
  WireId push(Gate g, WireInfo info);
  void check_operand(WireId w) const;
  std::size_t join_width(WireId a, WireId b) const;

  std::vector<Gate> gates_;
  std::vector<WireInfo> wires_;
  std::vector<OutputSpec> outputs_;
  std::uint32_t depth_ = 0;
};

}  // namespace privadome::mpc
