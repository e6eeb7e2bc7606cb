#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bhd {

/// Runs body(i) for i in [0, count) on `workers` threads with a static
/// contiguous partition. Results must be written to per-index slots, so the
/// outcome does not depend on the worker count. The first exception (by
/// chunk order) is rethrown after all threads join.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  const std::size_t w = std::clamp<std::size_t>(workers < 1 ? 1 : static_cast<std::size_t>(workers), 1,
                                                std::max<std::size_t>(count, 1));
  if (w == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  {
    std::vector<std::jthread> threads;
    threads.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
      const std::size_t lo = count * k / w;
      const std::size_t hi = count * (k + 1) / w;
      threads.emplace_back([&, k, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i) body(i);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace bhd
