#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lexdiar {

// Seeded sampling helpers on top of mt19937_64. std::*_distribution output
// is implementation-defined, so everything reproducible maps raw engine
// output itself.

inline double rng_uniform(std::mt19937_64 &g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53; // [0, 1)
}

inline uint64_t rng_below(std::mt19937_64 &g, uint64_t n) {
    // rejection sampling, unbiased
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
        v = g();
    } while (v >= limit);
    return v % n;
}

inline double rng_range(std::mt19937_64 &g, double lo, double hi) {
    return lo + (hi - lo) * rng_uniform(g);
}

inline double rng_gumbel(std::mt19937_64 &g) {
    double u;
    do {
        u = rng_uniform(g);
    } while (u <= 0.0);
    return -std::log(-std::log(u));
}

} // namespace lexdiar
