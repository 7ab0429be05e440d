#include "privadome/mpc/prg.hpp"

#include <sodium.h>

#include <cstring>
#include <limits>
#include <stdexcept>

namespace privadome::mpc {
namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

constexpr std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> kNonce{};

}  // namespace

Prg::Prg(const Key& key) : key_(key) { ensure_sodium(); }

Prg::Prg(std::uint64_t seed, std::string_view domain) {
  ensure_sodium();
  std::uint8_t seed_bytes[8];
  for (int i = 0; i < 8; ++i) seed_bytes[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, key_.size());
  crypto_generichash_update(&st, seed_bytes, sizeof seed_bytes);
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(domain.data()),
                            domain.size());
  crypto_generichash_final(&st, key_.data(), key_.size());
}

Prg Prg::from_entropy() {
  ensure_sodium();
  Key key;
  randombytes_buf(key.data(), key.size());
  return Prg(key);
}

void Prg::refill() {
  static const std::array<std::uint8_t, 4096> zeros{};
  crypto_stream_chacha20_xor_ic(buffer_.data(), zeros.data(), buffer_.size(), kNonce.data(),
                                block_counter_, key_.data());
  block_counter_ += buffer_.size() / 64;
  pos_ = 0;
}

void Prg::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ == buffer_.size()) refill();
    const std::size_t n = std::min(out.size() - done, buffer_.size() - pos_);
    std::memcpy(out.data() + done, buffer_.data() + pos_, n);
    pos_ += n;
    done += n;
  }
}

std::uint64_t Prg::next_u64() {
  std::array<std::uint8_t, 8> b;
  fill(b);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

RingElement Prg::next_ring() {
  const RingElement lo = next_u64();
  const RingElement hi = next_u64();
  return (hi << 64) | lo;
}

RingVector Prg::next_ring_vector(Eigen::Index count) {
  RingVector v(count);
  for (Eigen::Index i = 0; i < count; ++i) v(i) = next_ring();
  return v;
}

std::uint64_t Prg::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (hi <= lo) throw std::invalid_argument("Prg::uniform: empty range");
  const std::uint64_t span = hi - lo;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return lo + v % span;
}

double Prg::uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

Prg Prg::derive(std::string_view label) {
  Key material;
  fill(material);
  Key child;
  crypto_generichash(child.data(), child.size(), reinterpret_cast<const unsigned char*>(label.data()),
                     label.size(), material.data(), material.size());
  return Prg(child);
}

}  // namespace privadome::mpc
