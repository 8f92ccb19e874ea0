#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace rdesign {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based child seed: split(master, i) depends only on (master, i), so
/// replicate i draws the same stream no matter which thread runs it or how many
/// other replicates exist.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

/// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
/// Results must be written to index-addressed storage by the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rdesign
