/* Copyright 2026 The LFDA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef LFDA_CORE_PARALLEL_HPP_
#define LFDA_CORE_PARALLEL_HPP_

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lfda {

// Runs fn(i) for i in [0, n) on up to `threads` workers with a static
// round-robin partition. Workers must write only to disjoint output slots;
// result assembly stays deterministic because slot i is always task i.
// The first exception thrown by any worker is rethrown on the caller.
template <typename Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  size_t workers = std::min<size_t>(size_t(threads), n);
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (size_t i = t; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lfda

#endif  // LFDA_CORE_PARALLEL_HPP_
