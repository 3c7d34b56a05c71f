#ifndef REWIRE_RANDOM_HPP
#define REWIRE_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace rewire {

using Rng = std::mt19937_64;

/// Derives an independent child seed from a master seed and a stream tag,
/// so one master seed can fan out to every random stream of a run.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0) {
  // FNV-1a over the tag, then a splitmix64 finaliser.
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::uint64_t z = master ^ h ^ (index * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace rewire

#endif  // REWIRE_RANDOM_HPP
