#include "bcharge/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bcharge/errors.hpp"

namespace bcharge {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sample_seed(std::uint64_t master, std::uint64_t grid_index, std::uint64_t size,
                          std::uint64_t sample_index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ grid_index);
  h = splitmix64(h ^ size);
  return splitmix64(h ^ sample_index);
}

int filling_count(int sites, double nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw ConfigError("filling factor must lie in [0, 1]");
  return static_cast<int>(std::lround(nu * sites));
}

std::vector<std::uint8_t> random_occupation(int n, int k, std::uint64_t seed) {
  if (n < 0 || k < 0 || k > n) throw ConfigError("cannot place " + std::to_string(k) +
                                                 " particles on " + std::to_string(n) + " modes");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates: the first k entries are a uniform k-subset
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < k; ++i) occ[order[i]] = 1;
  return occ;
}

}  // namespace bcharge
