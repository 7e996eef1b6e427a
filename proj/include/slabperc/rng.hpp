// Counter-based uniform variates: every draw is a pure function of its key,
// so any subset of edges or trials can be regenerated independently.
#pragma once

#include <cstdint>

namespace slabperc {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ mix64(v + 0x632be59bd9b4e019ULL));
}

/// Top 53 bits mapped to [0,1).
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Key of a (seed, stream) pair; reused across all edges of one field.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return hash_combine(mix64(seed ^ 0x243f6a8885a308d3ULL), stream);
}

/// Uniform label of the lattice edge leaving (x,y,z) in positive direction
/// `dir` (0=x, 1=y, 2=z). Independent of any window, so overlapping windows
/// sampled with the same key agree on shared edges.
constexpr double edge_uniform(std::uint64_t key, int x, int y, int z, int dir) {
  const std::uint64_t xy = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
                           static_cast<std::uint32_t>(y);
  const std::uint64_t zd = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(z)) << 2) |
                           static_cast<std::uint64_t>(dir);
  return to_unit(hash_combine(hash_combine(key, xy), zd));
}

/// Small counter-based generator for auxiliary draws (test data, MC volume
/// samples). Deterministic in (key, counter).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  std::uint64_t next_u64() { return hash_combine(key_, counter_++); }
  double uniform() { return to_unit(next_u64()); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace slabperc
