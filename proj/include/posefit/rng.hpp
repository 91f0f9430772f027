#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace posefit {

/// PCG32 (XSH-RR variant). Chosen over <random> engines because the standard
/// distributions are not bit-stable across library implementations; every
/// draw here is defined by integer arithmetic plus fixed float transforms.
///
/// Stream splitting: each (seed, stream) pair selects an independent sequence.
/// Consumers pick streams from RngStream so that adding a draw in one module
/// never shifts another module's sequence.
class Pcg32 {
public:
    Pcg32(std::uint64_t seed, std::uint64_t stream) { reseed(seed, stream); }

    void reseed(std::uint64_t seed, std::uint64_t stream) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    /// Uniform double in [0, 1) with 53 random bits (two 32-bit draws).
    double uniform() {
        const std::uint64_t hi = next_u32() >> 5;   // 27 bits
        const std::uint64_t lo = next_u32() >> 6;   // 26 bits
        return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Standard normal via Box-Muller. Never caches the second deviate, so
    /// the draw count per call is fixed at two uniforms.
    double normal() {
        // uniform() can return 0; flip to (0, 1] for the log.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
};

/// Fixed stream ids, one per independent consumer of randomness.
enum class RngStream : std::uint64_t {
    corruption = 1,
    pose_sampling = 2,
    model_generation = 3,
    initial_guess = 4,
};

inline Pcg32 make_rng(std::uint64_t seed, RngStream stream) {
    return Pcg32(seed, static_cast<std::uint64_t>(stream));
}

/// SplitMix64 mix step; used to derive per-trial seeds in batch runs.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace posefit
