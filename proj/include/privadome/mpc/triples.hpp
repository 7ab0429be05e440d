#pragma once

#include "privadome/mpc/prg.hpp"
#include "privadome/mpc/share.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace privadome::mpc {

/// One party's fragments of a batch of multiplication triples (a, b, c = a*b).
/// Each triple may be consumed once.
class TripleStore {
 public:
  TripleStore() = default;
  TripleStore(PartyRole party, RingVector a, RingVector b, RingVector c);

  [[nodiscard]] PartyRole party() const { return party_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(a_.size()); }
  [[nodiscard]] std::size_t remaining() const { return size() - consumed_count_; }

  /// Ids of the next `count` unused triples in order; throws when exhausted.
  std::vector<std::size_t> next_ids(std::size_t count) const;

  /// Marks the triples consumed and returns their fragments; throws on reuse.
  void consume(std::span<const std::size_t> ids, RingVector& a, RingVector& b, RingVector& c);

  [[nodiscard]] const RingVector& a() const { return a_; }
  [[nodiscard]] const RingVector& b() const { return b_; }
  [[nodiscard]] const RingVector& c() const { return c_; }

 private:
  PartyRole party_ = PartyRole::Citizen;
  RingVector a_, b_, c_;
  std::vector<bool> used_;
  std::size_t consumed_count_ = 0;
  std::size_t cursor_ = 0;
};

struct DealerOutput {
  TripleStore citizen;
  TripleStore authority;
  /// Bytes a dealer would transmit: three fragments per triple to each party.
  std::size_t preprocessing_bytes = 0;
};

/// Trusted-dealer preprocessing from a CSPRNG stream.
DealerOutput dealer_generate_triples(Prg& rng, std::size_t count);
DealerOutput dealer_generate_triples(std::uint64_t seed, std::size_t count);

inline std::size_t dealer_bytes(std::size_t triples) { return triples * 3 * kFragmentBytes * 2; }

/// Sequential dealer stream shared by a session: each call yields the next batch.
/// Both parties hold an instance with the same seed and keep only their own half.
class DealerStream {
 public:
  DealerStream(Prg::Key key) : rng_(key) {}
  explicit DealerStream(Prg rng) : rng_(std::move(rng)) {}

  TripleStore next(PartyRole keep, std::size_t count, std::size_t* preprocessing_bytes = nullptr);

 private:
  Prg rng_;
};

}  // namespace privadome::mpc
