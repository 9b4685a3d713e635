#pragma once

#include <cstdint>
#include <random>

namespace mlocal {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent, reproducible stream `stream` of the generator family rooted at `seed`.
/// Work item i always draws from stream i, so results do not depend on scheduling.
inline std::mt19937_64 split_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL)));
}

}  // namespace mlocal
