#ifndef FORMCALC_PARALLEL_HPP
#define FORMCALC_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace formcalc {

/// Worker-pool size: min(hardware, FORMCALC_THREADS). Never zero.
inline int thread_budget() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("FORMCALC_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) hw = std::min(hw, cap);
  }
  return hw;
}

/// Runs body(i) for i in [0, count). Results must be written to
/// per-index slots by the caller; the reduction order is then fixed by
/// index, so the outcome does not depend on the thread count.
inline void parallel_for(long count, const std::function<void(long)>& body) {
  const int workers = std::min<long>(thread_budget(), std::max<long>(count, 1));
  if (workers <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next(0);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (long i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace formcalc

#endif
