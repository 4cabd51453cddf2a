#pragma once

#include <cstdint>
#include <random>

namespace confdim {

// splitmix64; used to derive independent substream seeds from (seed, index).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Substream seed scheme: batch k of a run seeded with s uses derive_seed(s, k).
// Batches are fixed-size and indexed independently of the worker count, so MC
// results do not depend on how batches are scheduled.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 1));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace confdim
