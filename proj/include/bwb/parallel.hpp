#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <cstdlib>
#include <thread>
#include <vector>

namespace bwb {

// Worker count: BWB_THREADS if set, else hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("BWB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// out[i] = f(i) for i < n; the result order never depends on scheduling.
template <class T, class F> std::vector<T> parallel_map(int n, F&& f) {
  std::vector<T> out(n);
  int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < n; i = next++) out[i] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace bwb
