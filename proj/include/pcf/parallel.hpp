#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

// Deterministic work-sharing over an index range. Results must be written to
// per-index slots; reductions happen sequentially afterwards, so outputs are
// bit-identical for any PCF_THREADS value (default 1).

namespace pcf {

inline int thread_count() {
  const char* env = std::getenv("PCF_THREADS");
  if (!env) return 1;
  const int v = std::atoi(env);
  if (v < 1) return 1;
  return v > 64 ? 64 : v;
}

inline void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_count(), count < 1 ? 1 : count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex err_mtx;
  std::exception_ptr first_err;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) {
          {
            std::lock_guard<std::mutex> lk(err_mtx);
            if (first_err) return;
          }
          fn(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mtx);
        if (!first_err) first_err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_err) std::rethrow_exception(first_err);
}

}  // namespace pcf
