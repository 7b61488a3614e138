// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <limits>

namespace tmplevo {

/// SplitMix64 generator. Bit-exact across platforms, which the std
/// distributions are not, so every seeded decision in the pipeline goes through it.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : mState(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (mState += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), rejection sampled. n must be positive.
    constexpr std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % n;
    }

    [[nodiscard]] constexpr std::uint64_t state() const { return mState; }

private:
    std::uint64_t mState;
};

/// Independent streams drawn from one run seed.
enum class Stream : std::uint64_t {
    Sampling = 1,
    Mutate = 2,
    Crossover = 3,
    Probe = 4,
    MockWorld = 5,
};

constexpr std::uint64_t mix64(std::uint64_t x) { return SplitMix64(x).next(); }

/// Seed for the stream keyed by (run seed, generation, member index). Keyed
/// streams keep decisions independent of call arrival order.
constexpr std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t generation,
                                    std::uint64_t member, Stream stream) {
    std::uint64_t h = mix64(run_seed ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
    h = mix64(h + generation);
    return mix64(h + member);
}

} // namespace tmplevo
