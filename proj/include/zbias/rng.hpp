#pragma once

#include <cstdint>

namespace zbias {

/// SplitMix64: a splittable 64-bit generator (Steele, Lea & Flood). The state
/// walks the golden-gamma orbit and outputs pass through a finalizing mix.
/// Used everywhere a seeded stream is required; `stream(seed, id)` derives an
/// independent stream per replicate or grid point, so results are identical
/// whether replicates run sequentially or in parallel.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double strictly inside (0, 1); safe to feed into quantile
    /// functions that reject the endpoints.
    double next_double_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform index in [0, n), n >= 1. Multiply-shift; bias < n / 2^64.
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool next_bernoulli(double p) { return next_double() < p; }

    /// Independent stream `id` of a root seed. Mixing the id through the
    /// output finalizer keeps distinct ids on far-apart orbits.
    static SplitMix64 stream(std::uint64_t root_seed, std::uint64_t id) {
        SplitMix64 g(root_seed ^ mix(id + 0x632BE59BD9B4E019ull));
        g.next_u64();  // discard first output so stream 0 differs from the raw root
        return g;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace zbias
