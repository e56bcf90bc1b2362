#pragma once

#include <cstdint>
#include <random>

namespace infbandit {

// Every random draw in the library goes through this engine so that a
// (seed, call sequence) pair fully determines the output.
using Rng = std::mt19937_64;

// Uniform double in the open interval (0, 1), built from the top 53 bits.
inline double uniform_open01(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based stream derivation: replicate i of an experiment seeded with
// `master` always gets the same stream, whichever thread runs it.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index));
}

} // namespace infbandit
