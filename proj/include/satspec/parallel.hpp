#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace satspec {

/// SATSPEC_THREADS if set to a positive integer, otherwise the hardware count.
unsigned worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index is visited exactly
/// once, so writing results into slot i keeps the outcome independent of scheduling.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace satspec
