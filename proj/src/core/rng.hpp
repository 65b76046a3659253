#pragma once
// Deterministic RNG used everywhere randomness appears.  splitmix64 with an
// explicit u64 -> double mapping so that streams are byte-reproducible across
// platforms and standard-library versions (std::uniform_real_distribution is
// implementation-defined, which would break fixed-seed regression tests).

#include <cstdint>

namespace ndsym {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform double in [0, 1), 53 mantissa bits
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // uniform double in [lo, hi)
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }
};

// independent per-path stream: hash the path index into the seed
inline SplitMix64 path_stream(std::uint64_t seed, std::uint64_t path) {
    SplitMix64 mix(seed ^ (0x9E3779B97F4A7C15ULL * (path + 1)));
    mix.next_u64(); // burn one step to decorrelate adjacent paths
    return mix;
}

} // namespace ndsym
