#pragma once

#include <cstdint>
#include <vector>

namespace bcharge {

std::uint64_t splitmix64(std::uint64_t x);

/// Per-sample seed derived from the master seed and the task coordinates.
/// Independent of worker count and execution order.
std::uint64_t sample_seed(std::uint64_t master, std::uint64_t grid_index, std::uint64_t size,
                          std::uint64_t sample_index);

/// Particle count for filling nu on L sites, rounded to nearest.
int filling_count(int sites, double nu);

/// Uniformly random 0/1 occupation pattern of length n with exactly k ones.
std::vector<std::uint8_t> random_occupation(int n, int k, std::uint64_t seed);

}  // namespace bcharge
