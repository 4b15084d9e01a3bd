#include "qmelab/rng.hpp"

namespace qmelab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

std::uint64_t RandomStream::next_u64() { return gen_(); }

double RandomStream::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

RandomStream RandomStream::substream(std::uint64_t key) const {
  return RandomStream(mix64(seed_ ^ mix64(key)));
}

}  // namespace qmelab
