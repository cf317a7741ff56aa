#pragma once

// Static-chunk parallel loop.  Callers write into preallocated slots indexed
// by i, so results are identical for any thread count; only wall time varies.

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace geoscat {

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

inline void parallel_for(long long n, int threads, const std::function<void(long long)>& body) {
  if (n <= 0) return;
  long long t_count = std::min<long long>(resolve_thread_count(threads), n);
  if (t_count <= 1) {
    for (long long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors;
  errors.resize(std::size_t(t_count));
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(t_count));
  for (long long t = 0; t < t_count; ++t)
    pool.emplace_back([&, t] {
      long long lo = n * t / t_count, hi = n * (t + 1) / t_count;
      try {
        for (long long i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[std::size_t(t)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace geoscat
