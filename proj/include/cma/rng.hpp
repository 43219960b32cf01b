#pragma once

#include <cstdint>

namespace cma {

// splitmix64; self-contained so that seeded runs are reproducible across
// platforms and standard libraries
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    uint64_t uniform_int(uint64_t n) { return next() % n; }

    int uniform_range(int lo, int hi) {  // inclusive bounds
        return lo + int(uniform_int(uint64_t(hi - lo + 1)));
    }
};

}  // namespace cma
