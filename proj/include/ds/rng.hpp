#pragma once

#include <cmath>
#include <cstdint>

namespace ds {

// SplitMix64 (Steele/Lea/Flood). Chosen as the project-wide generator
// because its output is defined purely by 64-bit integer arithmetic and is
// therefore bit-identical on every platform and compiler.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in (-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

private:
    std::uint64_t state_;
};

// SplitMix64 finalizer applied to a bare value; used to derive stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Initial SplitMix64 state for sub-stream `stream` of `seed`. Each sampled
// object (a sample point, a synthetic token, ...) gets its own stream, so
// generation order and thread count cannot change the output.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

// Standard normal variates via the Marsaglia polar method on a SplitMix64
// stream. Polar was chosen over ziggurat: it needs no tables, which keeps
// the cross-platform bit-exactness argument short.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t state) : rng_(state) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = rng_.next_symmetric();
            v = rng_.next_symmetric();
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

    // Draws from the underlying uniform stream, bypassing any cached spare.
    double next_unit() { return rng_.next_unit(); }

    std::uint64_t next_u64() { return rng_.next(); }

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ds
