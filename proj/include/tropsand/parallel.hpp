#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tropsand {

/// 0 means "use the available hardware parallelism".
inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(worker, begin, end) over [0, total) in fixed-size blocks claimed
/// in increasing order. body returns false to stop further claims of blocks
/// that start after the current one. The first exception is rethrown after
/// all workers join.
template <typename Body>
void for_each_block(std::int64_t total, std::int64_t block, unsigned workers,
                    Body&& body) {
  workers = resolve_workers(workers);
  std::atomic<std::int64_t> next{0};
  std::atomic<std::int64_t> stop_after{total};
  std::exception_ptr error;
  std::mutex error_mu;

  auto run = [&](unsigned worker) {
    try {
      for (;;) {
        const std::int64_t begin = next.fetch_add(block);
        if (begin >= total || begin > stop_after.load()) return;
        const std::int64_t end = std::min(total, begin + block);
        if (!body(worker, begin, end)) {
          std::int64_t cur = stop_after.load();
          while (begin < cur && !stop_after.compare_exchange_weak(cur, begin)) {
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      stop_after.store(-1);
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace tropsand
