#pragma once

#include <cstdint>
#include <random>

namespace ddstab {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent engine for stream `index` of a seeded experiment. Streams depend only on
/// (seed, index), so results do not depend on how work is scheduled.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(mix64(mix64(seed) ^ mix64(index + 0x5851f42d4c957f2dULL)));
}

}  // namespace ddstab
