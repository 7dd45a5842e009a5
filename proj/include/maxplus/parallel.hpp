#pragma once

// Minimal fork-join loop for grid scans. MAXPLUS_THREADS caps the worker
// count (default: all hardware threads).

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace maxplus {

inline unsigned worker_count() {
  if (const char* env = std::getenv("MAXPLUS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Calls body(begin, end) on disjoint contiguous chunks covering [0, count).
/// Each index is handled by exactly one call, so results written per index
/// do not depend on the thread count.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t min_chunk = 64) {
  if (count == 0) return;
  const std::size_t workers = std::min<std::size_t>(
      worker_count(), (count + min_chunk - 1) / min_chunk);
  if (workers <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace maxplus
