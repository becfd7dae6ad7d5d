#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace wirefit {

/// Worker count: WIREFIT_THREADS if set, else hardware concurrency (capped).
inline int thread_count() {
  if (const char* env = std::getenv("WIREFIT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 16u));
}

/// Chunked parallel loop. `body(begin, end)` must only write to disjoint
/// per-index slots so the result is independent of the thread count.
template <typename Body>
void parallel_for(int n, Body&& body) {
  const int workers = std::min(thread_count(), std::max(1, n));
  if (n <= 0) return;
  if (workers == 1 || n < 256) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace wirefit
