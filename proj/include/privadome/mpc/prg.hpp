#pragma once

#include "privadome/mpc/ring.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace privadome::mpc {

/// Seedable ChaCha20 keystream. Identical seeds give identical streams.
class Prg {
 public:
  using Key = std::array<std::uint8_t, 32>;

  explicit Prg(const Key& key);
  explicit Prg(std::uint64_t seed, std::string_view domain = {});

  /// Keyed from the operating system's entropy source.
  static Prg from_entropy();

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  RingElement next_ring();
  RingVector next_ring_vector(Eigen::Index count);
  /// Uniform integer in [lo, hi) by rejection sampling.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
  /// Uniform double in [0, 1).
  double uniform_real();
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

  /// Derives an independent child stream keyed by this stream's output and `label`.
  Prg derive(std::string_view label);

 private:
  void refill();

  Key key_{};
  std::uint64_t block_counter_ = 0;
  std::array<std::uint8_t, 4096> buffer_{};
  std::size_t pos_ = buffer_.size();
};

}  // namespace privadome::mpc
