#pragma once

/**
 * Deterministic seeding and random draws.
 *
 * Every random decision in the engine flows from a single root seed through
 * derive_seed(), so whole runs replay bit-identically. std::hash and the
 * standard distributions are avoided on purpose: their output is not pinned
 * by the standard, and replayability is a contract here.
 */

#include <cstdint>
#include <string_view>

namespace atomcot {

inline constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;

constexpr uint64_t splitmix64(uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr uint64_t seed_mix(uint64_t h, uint64_t v) {
  return splitmix64(h ^ splitmix64(v));
}

inline uint64_t seed_mix(uint64_t h, std::string_view s) {
  return seed_mix(h, fnv1a64(s));
}

inline uint64_t derive_seed(uint64_t root) { return splitmix64(root); }

template <typename T, typename... Rest>
uint64_t derive_seed(uint64_t root, T first, Rest... rest) {
  if constexpr (sizeof...(rest) == 0) {
    return seed_mix(root, first);
  } else {
    return derive_seed(seed_mix(root, first), rest...);
  }
}

/// Counter-based generator over the splitmix64 stream.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += kGolden;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double gaussian();

  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

 private:
  uint64_t state_;
};

}  // namespace atomcot
