#pragma once

#include "pam2d/common.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pam2d {

// Worker count used by every data-parallel map in the library. Results are
// always written by index, so outputs do not depend on this value.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, n), statically partitioned over the worker pool.
template <class Body>
void parallel_for(Index n, Body&& body) {
  const Index workers = std::min<Index>(thread_count(), std::max<Index>(n, 1));
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (Index w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const Index begin = n * w / workers;
        const Index end = n * (w + 1) / workers;
        try {
          for (Index i = begin; i < end; ++i) body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pam2d
