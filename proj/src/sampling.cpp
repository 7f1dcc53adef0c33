#include "cdyn/sampling.hpp"

#include <algorithm>

namespace cdyn {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::pair<long, long> task_range(long total, int tasks, int task) noexcept {
  const long base = total / tasks;
  const long extra = total % tasks;
  const long begin = task * base + std::min<long>(task, extra);
  return {begin, begin + base + (task < extra ? 1 : 0)};
}

}  // namespace cdyn
