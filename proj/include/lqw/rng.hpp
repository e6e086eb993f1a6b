#pragma once

// Seeded randomness with a fully specified algorithm, so target ensembles can
// be regenerated bit-for-bit by other implementations:
//   * engine: std::mt19937_64 seeded with a single 64-bit value;
//   * bounded draws: rejection sampling on masked low bits (no std distributions,
//     whose algorithms are implementation-defined);
//   * per-trial seeds: splitmix64 chain over (seed, side, m, trial).

#include <cstdint>
#include <random>
#include <string_view>

namespace lqw {

inline constexpr std::string_view kPrngId = "mt19937_64+rejection+splitmix64";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t side, std::uint64_t m,
                                    std::uint64_t trial) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ side);
    h = splitmix64(h ^ m);
    return splitmix64(h ^ trial);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        // Smallest all-ones mask covering bound - 1, then reject.
        std::uint64_t mask = bound - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        for (;;) {
            const std::uint64_t r = engine_() & mask;
            if (r < bound) return r;
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace lqw
