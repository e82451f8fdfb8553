#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace hodo {

// Run body(i) for i in [0, count) across at most `workers` threads. Work is
// dealt in fixed contiguous blocks, so which thread runs an index never
// depends on timing; callers write results into per-index slots and reduce
// afterwards in index order, which keeps every pipeline run-to-run identical
// regardless of worker count.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  int w = std::max(1, workers);
  if (w == 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  w = static_cast<int>(std::min<std::size_t>(w, count));
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + w - 1) / w;
  for (int t = 0; t < w; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace hodo
