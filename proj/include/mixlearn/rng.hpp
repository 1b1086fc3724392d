#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mixlearn {

// Deterministic random streams. The whole project draws randomness through
// this one generator so that every artifact is reproducible from a 64-bit
// seed, on any platform:
//
//   * engine: xoshiro256++, state expanded from the seed with splitmix64;
//   * doubles: top 53 bits of the engine output, uniform on [0, 1);
//   * standard normals: Marsaglia's polar method. Each normal consumes one
//     fresh accepted polar pair; the second coordinate of the pair is
//     discarded, so the stream position depends only on the number of draws;
//   * child streams: child i of a stream seeded with s is seeded with
//     child_seed(s, i). Mixture sampling gives component i the child stream
//     i and keeps the parent stream for component selection, so per-component
//     point streams are independent of how often other components are drawn.

inline constexpr std::uint64_t kGolden64 = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed of the i-th child stream of a generator seeded with `seed`.
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t i) {
    return splitmix64_mix(seed + kGolden64 * (i + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += kGolden64;
            word = splitmix64_mix(x);
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden64;
    }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1).
    double next_double() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via the polar method.
    double next_normal() noexcept {
        for (;;) {
            const double u = 2.0 * next_double() - 1.0;
            const double v = 2.0 * next_double() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    Rng child(std::uint64_t i) const { return Rng(child_seed(seed_, i)); }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_;
};

}  // namespace mixlearn
