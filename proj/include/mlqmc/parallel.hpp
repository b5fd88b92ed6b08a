#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mlqmc {

// Calls fn(begin, end) on contiguous chunks of [0, n). Chunk boundaries depend
// on n and threads only; callers write results per index so the output does not
// depend on scheduling.
template <class Fn>
void parallel_for_chunks(std::size_t n, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  const std::size_t t = std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, n);
  if (t == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(t);
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t b = n * k / t;
    const std::size_t e = n * (k + 1) / t;
    pool.emplace_back([&, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mlqmc
