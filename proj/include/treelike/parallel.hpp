#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>

namespace treelike {

/// Runs body(i) for i in [0, n) across OpenMP threads. If any iteration
/// throws, the exception from the lowest failing index is rethrown after the
/// loop, so errors are reported the same way regardless of thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr first;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  std::mutex mu;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (i < first_index) {
        first_index = i;
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

/// Serial counterpart of parallel_for with identical error semantics.
template <class Body>
void serial_for(std::size_t n, Body&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

int max_threads();

}  // namespace treelike
