#pragma once

/// Minimal deterministic work sharing: a static block partition of an index
/// range over a fixed number of worker threads. Each index is processed
/// exactly once and writes only to its own output slot, so results are
/// independent of the thread count and of scheduling order.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace orthofit {

inline unsigned resolve_threads(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Run body(i) for i in [0, count) across `threads` workers (0 = hardware
/// default). The first exception thrown by any worker is rethrown.
template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const unsigned nthreads = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t chunk = (count + nthreads - 1) / nthreads;
  for (unsigned tid = 0; tid < nthreads; ++tid) {
    const std::size_t lo = tid * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace orthofit
