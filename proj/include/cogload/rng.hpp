#pragma once

#include <cstdint>
#include <random>

namespace cogload {

// Named sub-streams so that, e.g., weight init and shuffle order drawn from
// the same user seed never share random numbers.
enum class RngStream : std::uint32_t {
  kSynthetic = 1,
  kFolds = 2,
  kWeightInit = 3,
  kHiddenInit = 4,
  kShuffle = 5,
  kMismatch = 6,
};

inline std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace cogload
