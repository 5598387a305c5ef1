#pragma once

// Portable random helpers. The standard distributions are implementation
// defined, so anything that must reproduce bit-for-bit across toolchains
// goes through these instead.

#include <cstdint>
#include <random>

namespace beamlearn::random {

/// Engine keyed by (seed, stream, tag). Distinct keys give independent
/// streams; the same key always gives the same stream.
inline std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t stream,
                                    std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), tag};
  return std::mt19937_64(seq);
}

/// Uniform on (0, 1].
inline double uniform_open_closed(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Uniform on (0, 1), on the midpoints of a 2^-52 grid.
inline double uniform_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 12) + 0.5) * 0x1.0p-52;
}

/// Uniform integer in [0, bound) by rejection; bound > 0.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % bound);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

}  // namespace beamlearn::random
