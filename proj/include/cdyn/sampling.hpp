#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace cdyn {

using Engine = std::mt19937_64;

/// Independent stream seed for task `index` of a run seeded with `seed` (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Uniform double in [0, 1) built from the top 53 bits, identical on every platform.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Half-open slice [begin, end) of `total` items owned by task `task` out of `tasks`.
std::pair<long, long> task_range(long total, int tasks, int task) noexcept;

/// Runs fn(task) for task = 0..tasks-1, on separate threads when tasks > 1.
/// The first exception thrown by any task is rethrown after all tasks finish.
template <class Fn>
void run_tasks(int tasks, Fn&& fn);

}  // namespace cdyn

#include "cdyn/detail/run_tasks.inl"
