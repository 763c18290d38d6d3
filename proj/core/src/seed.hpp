#pragma once

#include <cstdint>

namespace amcp::detail {

enum class SeedStream : std::uint64_t { kPaint = 1, kColor = 2, kObjective = 3 };

inline std::uint64_t derive_seed(std::uint64_t seed, int step, SeedStream stream) {
  std::uint64_t z = seed ^ (static_cast<std::uint64_t>(step) << 32) ^
                    (static_cast<std::uint64_t>(stream) << 56);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return (z ^ (z >> 31)) >> 16;  // headroom for seed + sample index
}

}  // namespace amcp::detail
