#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace evok {

/// SplitMix64 (Steele, Lea, Flood 2014). Used only to expand a 64-bit seed
/// into xoshiro state.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman, Vigna). Seeded by four SplitMix64 outputs.
///
/// Every random decision in the project goes through this generator and the
/// helpers below so that draw sequences can be replayed bit-for-bit by an
/// oracle written in any language (see docs/link_sim.md).
class Rng {
public:
    explicit constexpr Rng(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto& word : s_) word = sm.next();
    }

    /// Raw state, for reproducing published reference vectors.
    static constexpr Rng from_state(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3) noexcept {
        Rng r(0);
        r.s_[0] = s0;
        r.s_[1] = s1;
        r.s_[2] = s2;
        r.s_[3] = s3;
        return r;
    }

    constexpr std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1): top 53 bits scaled by 2^-53.
    constexpr double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, max_inclusive], computed as floor(u * (max+1)).
    std::int64_t uniform_int(std::int64_t max_inclusive) noexcept {
        if (max_inclusive <= 0) return 0;
        const auto span = static_cast<double>(max_inclusive + 1);
        auto v = static_cast<std::int64_t>(std::floor(next_double() * span));
        return v > max_inclusive ? max_inclusive : v;
    }

    /// Standard normal via Box-Muller (two draws, cosine branch only).
    double gaussian() noexcept {
        double u1 = next_double();
        const double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Exponential with the given mean.
    double exponential(double mean) noexcept {
        return -mean * std::log1p(-next_double());
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
};

}  // namespace evok
