#pragma once

#include <cmath>
#include <cstdint>

namespace locload {

// Finalizer of the splitmix64 generator. Full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed plus one or two
// counters (epoch, step, sample index, ...). Every simulated learner can
// regenerate the same stream from the same inputs, with no communication
// and no platform-dependent library calls.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) {
    std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ULL);
    return mix64(s ^ (a + 0xbf58476d1ce4e5b9ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix64(derive_seed(seed, a) ^ (b + 0x94d049bb133111ebULL));
}

// splitmix64 stream. Deterministic and identical on every platform for the
// same seed, unlike std::uniform_int_distribution whose mapping is
// implementation-defined.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        return mix64(z);
    }

    // Unbiased draw in [0, n). Multiply-shift with rejection (Lemire).
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            __uint128_t m = static_cast<__uint128_t>(r) * n;
            if (static_cast<std::uint64_t>(m) >= threshold) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

    // Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. Consumes two draws per call.
    double next_gaussian() {
        double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace locload
