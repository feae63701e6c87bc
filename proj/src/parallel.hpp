#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace regiolex::detail {

/// Runs fn(i) for i in [0, n) over contiguous blocks on the available
/// hardware threads. fn must only write state owned by index i. The first
/// exception thrown by any block is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t min_block = 256) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t blocks = std::min(hw, (n + min_block - 1) / std::max<std::size_t>(1, min_block));
  if (blocks <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(blocks);
  std::vector<std::thread> workers;
  workers.reserve(blocks);
  const std::size_t chunk = (n + blocks - 1) / blocks;
  for (std::size_t b = 0; b < blocks; ++b) {
    workers.emplace_back([&, b] {
      try {
        const std::size_t end = std::min(n, (b + 1) * chunk);
        for (std::size_t i = b * chunk; i < end; ++i) fn(i);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace regiolex::detail
