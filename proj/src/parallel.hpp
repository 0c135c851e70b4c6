#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace normalis::detail {

/// Runs fn(begin, end) over [0, count) split into contiguous chunks, one
/// per worker. The first exception thrown by a worker is rethrown.
template <class Fn>
void parallel_ranges(int count, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    fn(0, count);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      const int begin = static_cast<int>(static_cast<long long>(count) * t / threads);
      const int end = static_cast<int>(static_cast<long long>(count) * (t + 1) / threads);
      workers.emplace_back([&, t, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace normalis::detail
