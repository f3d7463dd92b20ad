#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "hotstart/vec2.hpp"

namespace hotstart {

// std::uniform_real_distribution is implementation-defined; these helpers keep
// every artifact bit-reproducible across standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Child seed for stream `counter` of `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    return splitmix64(splitmix64(master) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

inline Vec2 uniform_in_world(Rng& rng) {
    const double x = uniform(rng, kWorldMin, kWorldMax);
    const double y = uniform(rng, kWorldMin, kWorldMax);
    return {x, y};
}

} // namespace hotstart
