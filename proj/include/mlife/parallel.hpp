#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mlife {

// Worker count: MLIFE_THREADS caps it, hardware_concurrency is the default.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("MLIFE_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// Static chunking over [0, n). Callers must write to disjoint slots so the
// result is identical for any worker count.
inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& chunk) {
  std::size_t workers = std::min(worker_count(), n == 0 ? std::size_t{1} : n);
  if (n == 0) return;
  if (workers <= 1) {
    chunk(0, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  std::size_t per = n / workers, extra = n % workers, begin = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t end = begin + per + (w < extra ? 1 : 0);
    if (w + 1 == workers) {
      chunk(begin, end);
    } else {
      threads.emplace_back([&chunk, begin, end] { chunk(begin, end); });
    }
    begin = end;
  }
  for (auto& t : threads) t.join();
}

}  // namespace mlife
