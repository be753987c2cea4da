// Seedable, splittable 64-bit RNG used by the Metropolis chain and bootstrap
// resampling. Hand-rolled (splitmix64 + xoshiro256++) so that trajectories are
// reproducible bit for bit across compilers; std::uniform_* distributions are
// implementation-defined and would break byte-identical sample logs.
#pragma once

#include <cstdint>

namespace wr {

/// SplitMix64 step (Steele, Lea, Vigna). Used for seeding and for deriving
/// independent child seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic child seed for replica `index` of a run seeded with `seed`.
/// Replicas seeded this way are independent streams regardless of which
/// worker thread executes them.
inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

/// xoshiro256++ (Blackman, Vigna 2019). Small, fast, and well tested;
/// state is seeded through splitmix64 as the authors recommend.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x853C49E6748FEA9BULL) noexcept { reseed(seed); }

    void reseed(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform integer in [0, n). n must be nonzero. Plain modulo reduction:
    /// the bias for the tiny ranges used here (sites, types, resample indices)
    /// is below 2^-50 and reproducibility matters more than the last bit.
    std::uint64_t next_below(std::uint64_t n) noexcept { return next_u64() % n; }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

} // namespace wr
