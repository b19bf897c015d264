#pragma once

#include <cmath>
#include <cstdint>

namespace smart {

// Seeded, portable random number generation. std::mt19937 itself is
// reproducible, but the standard distributions are not specified
// bit-exactly across library implementations, so the simulator uses
// xoshiro256++ with hand-rolled uniform/normal transforms instead.
//
// Stream-splitting rule: every consumer derives its own independent
// substream from the run seed via splitmix64 over (seed, robot_id, tag):
//   noise stream of robot i : substream(seed, i, kNoiseStream)
//   hold  stream of robot i : substream(seed, i, kHoldStream)
// Draw order within one stream is fixed by the per-robot tick sequence,
// so runs are bit-identical for a given (plan, config, seed).

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;  // "noise"
inline constexpr std::uint64_t kHoldStream = 0x686f6c64ULL;     // "hold"

class Xoshiro256pp {
public:
    Xoshiro256pp() : Xoshiro256pp(0) {}

    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
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

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4];
};

// Derive the substream generator for (seed, robot, tag).
inline Xoshiro256pp substream(std::uint64_t seed, std::uint64_t robot_id, std::uint64_t tag) {
    std::uint64_t sm = seed;
    std::uint64_t a = splitmix64(sm);
    sm = a ^ (robot_id + 1) * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64(sm);
    sm = b ^ tag;
    return Xoshiro256pp(splitmix64(sm));
}

}  // namespace smart
