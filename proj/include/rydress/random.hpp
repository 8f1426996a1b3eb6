#pragma once

#include <cstdint>
#include <random>

namespace rydress {

/// Independent generator for work item `index` of a run seeded with `seed`.
/// The same (seed, index) pair always yields the same stream, whatever
/// thread evaluates it.
std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t index);

}  // namespace rydress
