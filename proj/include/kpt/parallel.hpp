#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace kpt {

// Runs fn(i) for i in [0, count). Work items must be independent; callers
// get determinism by writing to per-index slots and reducing afterwards,
// so results cannot depend on the worker count or on scheduling.
template <class F>
void parallel_for(long count, int workers, F&& fn) {
  if (count <= 0) return;
  if (workers <= 1 || count == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  const long chunk = std::max<long>(1, count / (static_cast<long>(workers) * 8));
  auto worker = [&] {
    for (;;) {
      const long start = next.fetch_add(chunk);
      if (start >= count) return;
      const long end = std::min(count, start + chunk);
      for (long i = start; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace kpt
