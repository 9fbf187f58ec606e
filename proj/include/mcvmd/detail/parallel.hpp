#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mcvmd::detail {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
// handled by exactly one worker and writes only its own outputs, so results do
// not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

}  // namespace mcvmd::detail
