#pragma once

#include <cstdint>
#include <string>

namespace sqlrl {

// splitmix64; single u64 state so checkpoints can carry it verbatim.
struct Rng {
    uint64_t state = 0x9e3779b97f4a7c15ull;

    explicit Rng(uint64_t seed = 0) : state(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    uint64_t next_below(uint64_t n) {
        // rejection sampling to avoid modulo bias
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // uniform integer in [lo, hi] inclusive
    int64_t next_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // derive an independent stream, e.g. per-database seeds
    static uint64_t mix(uint64_t seed, uint64_t index) {
        Rng r(seed ^ (0xd1b54a32d192ed03ull * (index + 1)));
        return r.next_u64();
    }
};

} // namespace sqlrl
