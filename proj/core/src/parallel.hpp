#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace dnorm::detail {

/// Calls fn(row_begin, row_end) over contiguous row blocks, one block per
/// thread. Per-pixel kernels produce identical output for any partition.
template <typename Fn>
void for_row_blocks(int begin, int end, unsigned threads, Fn&& fn) {
  const int span = end - begin;
  if (span <= 0) return;
  const unsigned workers = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(span));
  if (workers == 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const int chunk = span / static_cast<int>(workers);
  const int extra = span % static_cast<int>(workers);
  int start = begin;
  for (unsigned w = 0; w < workers; ++w) {
    const int stop = start + chunk + (static_cast<int>(w) < extra ? 1 : 0);
    if (w + 1 == workers) {
      fn(start, stop);
    } else {
      pool.emplace_back([&fn, start, stop] { fn(start, stop); });
    }
    start = stop;
  }
}

}  // namespace dnorm::detail
