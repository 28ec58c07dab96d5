#pragma once

#include <cstdint>
#include <random>

namespace vlab {

// All randomized sampling goes through one engine type so that
// (seed, config) -> output is reproducible across the code base.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) {
    // splitmix64 scramble so that small consecutive seeds give unrelated streams
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
}

inline double uniform(Rng& rng, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

} // namespace vlab
