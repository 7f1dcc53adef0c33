#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cdyn {

template <class Fn>
void run_tasks(int tasks, Fn&& fn) {
  if (tasks <= 1) {
    fn(0);
    return;
  }
  std::exception_ptr first;
  std::mutex guard;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(tasks));
  for (int t = 0; t < tasks; ++t) {
    pool.emplace_back([&, t] {
      try {
        fn(t);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace cdyn
