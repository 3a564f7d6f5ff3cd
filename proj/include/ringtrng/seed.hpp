#pragma once

#include <cstdint>

namespace ringtrng {

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives a child seed from (parent, index). Every derived stream in the
// project (per-source, per-oscillator, per-config, per-replicate) goes through
// this function:
//
//   mix(parent, index) = splitmix64(splitmix64(parent) ^ (index * 0xD1B54A32D192ED03))
//
// Distinct indices under one parent give unrelated 64-bit seeds.
constexpr std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(parent) ^ (index * 0xD1B54A32D192ED03ULL));
}

}  // namespace ringtrng
