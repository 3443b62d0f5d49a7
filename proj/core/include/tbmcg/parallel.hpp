#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace tbmcg {

/// Number of workers to use when the caller passes 0.
inline std::size_t default_jobs() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Evaluates work(i) for i in [0, count) on up to `jobs` threads and hands
/// each result to reduce(i, result) strictly in index order, so the
/// reduction is deterministic regardless of scheduling. Results are held
/// for at most one batch at a time.
template <typename Work, typename Reduce>
void ordered_parallel_for(std::size_t count, std::size_t jobs, Work&& work, Reduce&& reduce) {
  using Result = decltype(work(std::size_t{0}));
  jobs = jobs == 0 ? default_jobs() : jobs;
  const std::size_t batch = std::max<std::size_t>(jobs * 2, 1);
  for (std::size_t base = 0; base < count; base += batch) {
    const std::size_t n = std::min(batch, count - base);
    std::vector<std::optional<Result>> slots(n);
    if (jobs == 1 || n == 1) {
      for (std::size_t i = 0; i < n; ++i) {
        slots[i].emplace(work(base + i));
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::exception_ptr> errors(n);
      auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            slots[i].emplace(work(base + i));
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      };
      std::vector<std::thread> pool;
      const std::size_t threads = std::min(jobs, n);
      pool.reserve(threads);
      for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back(worker);
      }
      for (auto& t : pool) {
        t.join();
      }
      for (auto& e : errors) {
        if (e) {
          std::rethrow_exception(e);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      reduce(base + i, std::move(*slots[i]));
    }
  }
}

}  // namespace tbmcg
