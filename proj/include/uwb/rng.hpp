#pragma once

#include <cstdint>
#include <random>

namespace uwb {

using Rng = std::mt19937_64;

// splitmix64 step, used to spread seed material
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic per-task seed derived from (master, a, b). Distinct (a, b) pairs give
// independent streams, so work units can run in any order or in parallel.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= 0xA24BAED4963EE407ULL * (a + 1);
    h ^= splitmix64(s);
    s ^= 0x9FB21C651E98DF25ULL * (b + 1);
    h ^= splitmix64(s);
    return h;
}

inline Rng make_rng(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return Rng(derive_seed(master, a, b));
}

} // namespace uwb
