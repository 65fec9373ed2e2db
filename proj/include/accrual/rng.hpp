// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace accrual {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for an independent stream identified by `path` under `seed`.
/// Deterministic; distinct paths give unrelated seeds.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(seed);
    for (auto p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

/// Uniform double in (0, 1), never exactly 0 or 1.
inline double uniform_open(Rng& rng) {
    // 53 random bits centred in their bucket.
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Stream tags.
inline constexpr std::uint64_t kSamplerStream = 1;
inline constexpr std::uint64_t kForecastStream = 2;
inline constexpr std::uint64_t kSimulationStream = 3;
inline constexpr std::uint64_t kCorpusStream = 4;

}  // namespace accrual
