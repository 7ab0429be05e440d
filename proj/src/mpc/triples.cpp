#include "privadome/mpc/triples.hpp"

#include <string>

namespace privadome::mpc {

TripleStore::TripleStore(PartyRole party, RingVector a, RingVector b, RingVector c)
    : party_(party), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), used_(size(), false) {
  if (a_.size() != b_.size() || a_.size() != c_.size()) {
    throw ProtocolError("triple store: component sizes differ");
  }
}

std::vector<std::size_t> TripleStore::next_ids(std::size_t count) const {
  if (cursor_ + count > size()) {
    throw ProtocolError("triple store exhausted: need " + std::to_string(count) + ", have " +
                        std::to_string(size() - cursor_));
  }
  std::vector<std::size_t> ids(count);
  for (std::size_t i = 0; i < count; ++i) ids[i] = cursor_ + i;
  return ids;
}

void TripleStore::consume(std::span<const std::size_t> ids, RingVector& a, RingVector& b,
                          RingVector& c) {
  // Marking as we go also catches an id repeated within the batch.
  for (const std::size_t id : ids) {
    if (id >= size()) throw ProtocolError("triple id " + std::to_string(id) + " out of range");
    if (used_[id]) throw ProtocolError("triple " + std::to_string(id) + " already consumed");
    used_[id] = true;
  }
  const auto n = static_cast<Eigen::Index>(ids.size());
  a.resize(n);
  b.resize(n);
  c.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t id = ids[static_cast<std::size_t>(k)];
    a(k) = a_(static_cast<Eigen::Index>(id));
    b(k) = b_(static_cast<Eigen::Index>(id));
    c(k) = c_(static_cast<Eigen::Index>(id));
    if (id >= cursor_) cursor_ = id + 1;
  }
  consumed_count_ += ids.size();
}

DealerOutput dealer_generate_triples(Prg& rng, std::size_t count) {
  const auto n = static_cast<Eigen::Index>(count);
  const RingVector a = rng.next_ring_vector(n);
  const RingVector b = rng.next_ring_vector(n);
  const RingVector c = a * b;
  const RingVector a_c = rng.next_ring_vector(n);
  const RingVector b_c = rng.next_ring_vector(n);
  const RingVector c_c = rng.next_ring_vector(n);
  return {TripleStore(PartyRole::Citizen, a_c, b_c, c_c),
          TripleStore(PartyRole::Authority, a - a_c, b - b_c, c - c_c), dealer_bytes(count)};
}

DealerOutput dealer_generate_triples(std::uint64_t seed, std::size_t count) {
  Prg rng(seed, "dealer");
  return dealer_generate_triples(rng, count);
}

TripleStore DealerStream::next(PartyRole keep, std::size_t count,
                               std::size_t* preprocessing_bytes) {
  DealerOutput out = dealer_generate_triples(rng_, count);
  if (preprocessing_bytes) *preprocessing_bytes += out.preprocessing_bytes;
  return keep == PartyRole::Citizen ? std::move(out.citizen) : std::move(out.authority);
}

}  // namespace privadome::mpc
