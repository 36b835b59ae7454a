#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace funcito {

// Worker cap: FUNCITO_THREADS if set, hardware concurrency otherwise.
inline unsigned worker_count() {
  if (const char* env = std::getenv("FUNCITO_THREADS")) {
    const long k = std::strtol(env, nullptr, 10);
    if (k >= 1) return static_cast<unsigned>(k);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs fn(i) for i in [0, n) across workers. Each index is processed exactly
// once; callers write to per-index slots, so results are independent of the
// scheduling (reductions then happen sequentially in index order). The first
// exception thrown by any worker is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace funcito
