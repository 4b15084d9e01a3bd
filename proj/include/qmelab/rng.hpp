#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qmelab {

// SplitMix64 finalizer; used for seed derivation and key hashing.
std::uint64_t mix64(std::uint64_t x);

// FNV-1a over a string, for keying substreams by arm label etc.
std::uint64_t fnv1a64(std::string_view s);

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);

// Seeded uniform source. One stream is owned by exactly one consumer
// (a trajectory, a tomography job); parallel work derives independent
// substreams from the same base seed, so results do not depend on
// scheduling order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0,1) with 53 random bits.
  double uniform();

  // Derived stream; deterministic in (base seed, key), independent of
  // how much this stream has been consumed.
  RandomStream substream(std::uint64_t key) const;

  std::uint64_t base_seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace qmelab
