#pragma once

// Index-parallel map over a fixed number of tasks. Results come back in index
// order, so reductions do not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace jnb {

/// 0 means one worker per hardware thread.
inline unsigned resolve_jobs(unsigned jobs) noexcept {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

template <class F>
auto parallel_map(std::size_t n_tasks, unsigned jobs, F&& task) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> results(n_tasks);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_jobs(jobs), n_tasks));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) results[i] = task(i);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n_tasks; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_tasks;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace jnb
