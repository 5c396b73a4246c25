#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tripssqp {

/// Independent random streams drawn within one iteration.
enum class Stream : std::uint64_t {
  gradient = 1,
  value_current = 2,
  value_trial = 3,
  hessian = 4,
  problem = 5,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Hashes an ordered tuple of words into one 64-bit key.
inline std::uint64_t hash_key(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

/// Engine keyed by (run seed, iteration, stream). Re-creating it with the same
/// key reproduces the same draws; distinct keys give independent streams.
inline std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t iteration, Stream stream) {
  return std::mt19937_64(hash_key({seed, iteration, static_cast<std::uint64_t>(stream)}));
}

}  // namespace tripssqp
