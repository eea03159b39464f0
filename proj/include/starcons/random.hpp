#pragma once

#include <cstdint>
#include <random>

namespace starcons {

using Rng = std::mt19937_64;

/// Seeds the engine through seed_seq so nearby seeds give unrelated streams.
inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x5a17u};
  return Rng(seq);
}

/// Draws an independent child seed from a parent engine.
inline std::uint64_t child_seed(Rng& rng) { return rng(); }

}  // namespace starcons
