#pragma once

#include <cstdint>
#include <random>

namespace ansnis {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable seed for one replication; independent of run order and thread count.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t method_id,
                                    std::uint64_t budget, std::uint64_t replication) {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ method_id);
  h = mix64(h ^ budget);
  h = mix64(h ^ replication);
  return h;
}

}  // namespace ansnis
