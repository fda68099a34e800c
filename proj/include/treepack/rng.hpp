#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace treepack {

/// SplitMix64 finaliser; used both as a seed scrambler and to derive
/// independent child streams from a master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for the stream identified by `path` under `master`. Each
/// component is folded through splitmix64, so streams for distinct paths
/// are unrelated and do not depend on the order in which they are created.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t p : path)
        s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

/// mt19937_64 has a standardised output sequence; the helpers below avoid the
/// implementation-defined std distributions so results are identical across
/// standard libraries.
using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

/// Uniform integer in [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t bound)
{
    const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - bound) % bound;
    // limit == 0 means bound divides 2^64 exactly.
    for (;;) {
        std::uint64_t x = rng();
        if (limit == 0 || x < limit)
            return x % bound;
    }
}

/// Uniform double in [0,1) with 53 random bits.
inline double uniform_unit(Engine& rng) { return double(rng() >> 11) * 0x1.0p-53; }

} // namespace treepack
