#pragma once

#include <cstdint>

namespace hypcircle {

/// splitmix64. Small, fast, and identical output on every platform, which is
/// what pins down the per-seed reproducibility contract of the experiments.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    /// Independent substream k of a master seed; samples drawn from
    /// substream(seed, k) do not depend on how work is split across workers.
    static Rng substream(uint64_t seed, uint64_t k) {
        Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
        r.next();
        return r;
    }

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace hypcircle
