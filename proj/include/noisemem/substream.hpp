#pragma once

#include <cstdint>
#include <random>

namespace noisemem {

using Engine = std::mt19937_64;

/// Purpose of a random stream; keeps streams for different jobs disjoint
/// even when they share a master seed and index.
enum class StreamTag : std::uint64_t {
  ensemble = 0x656e73,
  counting = 0x636e74,
  bootstrap = 0x626f6f,
  sampler = 0x736d70,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Engine keyed by (master seed, tag, index). The same key always yields the
/// same sequence, so work item i draws identical numbers on any thread.
inline Engine substream(std::uint64_t master, StreamTag tag, std::uint64_t index) {
  std::uint64_t key = mix64(master);
  key = mix64(key ^ static_cast<std::uint64_t>(tag));
  key = mix64(key ^ index);
  return Engine(key);
}

} // namespace noisemem
