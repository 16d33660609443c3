#pragma once

#include <cstdint>
#include <random>

namespace confspec {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of sub-stream `index` under a root seed. Replication k of a sweep
// always gets derive_seed(root, k), independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(root) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

inline Engine make_engine(std::uint64_t root, std::uint64_t index) {
  return Engine(derive_seed(root, index));
}

}  // namespace confspec
