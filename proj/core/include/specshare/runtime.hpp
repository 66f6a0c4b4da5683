// Copyright 2026 The specshare Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPECSHARE_RUNTIME_HPP
#define SPECSHARE_RUNTIME_HPP

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace specshare {

// Worker count used by per-state maps and reductions. Defaults to the
// hardware concurrency, overridable with SPECSHARE_THREADS or set_max_threads.
std::size_t max_threads();
void set_max_threads(std::size_t n);  // 0 restores the default

namespace detail {

// All expectations in the library are sample means computed with this blocked
// reduction: per-block partial sums are formed in index order and combined in
// block order, so the result is bit-identical for any worker count.
inline constexpr std::size_t kReduceBlock = 4096;

template <class Fn>
void run_blocks(std::size_t n_blocks, Fn&& per_block) {
  // Spawning threads costs more than a handful of blocks' worth of work.
  const std::size_t workers =
      n_blocks < 8 ? 1 : std::min(max_threads(), n_blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) per_block(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) return;
      per_block(b);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();
}

// Mean of term(i) over i in [0, n). term must be pure or write only to
// per-index slots.
template <class Fn>
double blocked_mean(std::size_t n, Fn&& term) {
  if (n == 0) return 0.0;
  const std::size_t n_blocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(n_blocks, 0.0);
  run_blocks(n_blocks, [&](std::size_t b) {
    const std::size_t lo = b * kReduceBlock;
    const std::size_t hi = std::min(lo + kReduceBlock, n);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[b] = s;
  });
  double total = 0.0;
  for (double s : partial) total += s;
  return total / static_cast<double>(n);
}

template <class Fn>
void parallel_for(std::size_t n, Fn&& body) {
  if (n == 0) return;
  const std::size_t n_blocks = (n + kReduceBlock - 1) / kReduceBlock;
  run_blocks(n_blocks, [&](std::size_t b) {
    const std::size_t lo = b * kReduceBlock;
    const std::size_t hi = std::min(lo + kReduceBlock, n);
    for (std::size_t i = lo; i < hi; ++i) body(i);
  });
}

}  // namespace detail
}  // namespace specshare

#endif  // SPECSHARE_RUNTIME_HPP
