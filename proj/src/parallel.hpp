#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace sdfem::detail {

// Splits [0, n) into contiguous chunks handled by up to `workers` threads.
// Callers write results into per-index slots, so the outcome does not depend
// on the worker count.
template <class F>
void parallel_for(int n, int workers, F&& body) {
  workers = std::clamp(workers, 1, std::max(1, n));
  if (workers == 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk, end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sdfem::detail
