#pragma once

#include <cstdint>
#include <random>

namespace tdq {

// All samplers take an explicit RNG. Replicated experiments derive one
// independent substream per replicate index so that results do not depend
// on scheduling or thread count.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Substream for replicate `index` of the run seeded with `seed`.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t mixed = splitmix64(splitmix64(seed) ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + 1));
  return Rng(mixed);
}

inline bool coin(Rng& rng) { return (rng() >> 33) & 1; }

// Uniform integer in [0, n).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

inline double uniform01(Rng& rng) {
  // 53-bit mantissa, never exactly 0.
  return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace tdq
