#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace lts {

/// Splits [0, total) into a fixed partition (at most 64 contiguous chunks,
/// derived from total alone), runs scan(begin, end) per chunk on up to
/// `threads` workers, and folds the chunk results strictly in chunk order.
/// Because the partition and the fold order never depend on the thread count
/// or the schedule, the outcome matches a single-threaded run exactly.
/// The first failing chunk (by chunk order) has its exception rethrown.
template <typename State, typename ScanFn, typename CombineFn>
State chunked_parallel_fold(std::uint64_t total, unsigned threads, State init,
                            ScanFn&& scan, CombineFn&& combine) {
  if (total == 0) return init;

  const std::uint64_t chunk_count = total < 64 ? total : 64;
  auto chunk_begin = [&](std::uint64_t c) {
    return total / chunk_count * c + std::min(c, total % chunk_count);
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(threads == 0 ? 1 : threads, chunk_count));

  if (workers <= 1) {
    State acc = std::move(init);
    for (std::uint64_t c = 0; c < chunk_count; ++c) {
      combine(acc, scan(chunk_begin(c), chunk_begin(c + 1)));
    }
    return acc;
  }

  std::vector<std::optional<State>> results(chunk_count);
  std::vector<std::exception_ptr> errors(chunk_count);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunk_count) return;
      try {
        results[c] = scan(chunk_begin(c), chunk_begin(c + 1));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::uint64_t c = 0; c < chunk_count; ++c) {
    if (errors[c]) std::rethrow_exception(errors[c]);
  }
  State acc = std::move(init);
  for (std::uint64_t c = 0; c < chunk_count; ++c) {
    combine(acc, std::move(*results[c]));
  }
  return acc;
}

}  // namespace lts
