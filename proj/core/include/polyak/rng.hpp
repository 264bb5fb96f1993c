#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace polyak {

// Counter-based generator: every draw is a pure function of (seed, counter),
// so stochastic runs replay identically regardless of thread or call order.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t keyed_counter(std::uint64_t seed, std::uint64_t counter) {
    return splitmix64(splitmix64(seed) ^ counter * 0xd1342543de82ef95ull);
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(keyed_counter(seed, counter) >> 11) * 0x1.0p-53;
}

// Uniform in [lo, hi).
inline double uniform(std::uint64_t seed, std::uint64_t counter, double lo, double hi) {
    return lo + (hi - lo) * uniform01(seed, counter);
}

// Inverse-CDF draw from a finite probability vector.
inline int draw_index(std::span<const double> weights, std::uint64_t seed, std::uint64_t counter) {
    const double u = uniform01(seed, counter);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace polyak
