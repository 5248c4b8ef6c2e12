#pragma once

#include <cstdint>
#include <random>

namespace abctk {

/// The toolkit's generator. Every run logs the master seed it was started with.
using Rng = std::mt19937_64;

/// One step of SplitMix64; advances `state` and returns a well mixed word.
std::uint64_t splitmix64(std::uint64_t& state);

/// Independent stream `index` derived from `master_seed`.
///
/// The stream is seeded with eight SplitMix64 words of (master_seed, index), so
/// worker k of a parallel run and replicate k of a sequential run see the same
/// numbers. This is the split function behind all per-worker and per-replicate
/// streams.
Rng make_stream(std::uint64_t master_seed, std::uint64_t index);

/// Seed from system entropy, used when no `seed` is configured.
std::uint64_t entropy_seed();

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace abctk
