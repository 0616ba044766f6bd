#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace casetl {

// Runs fn(i) for i in [0, n) on at most `max_in_flight` threads. Items are
// claimed in index order; callers write results into per-index slots so the
// output order does not depend on scheduling. The first exception escaping
// fn is rethrown after all workers stop.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t max_in_flight, Fn&& fn) {
  std::size_t workers = std::clamp<std::size_t>(max_in_flight, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace casetl
