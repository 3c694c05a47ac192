#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace lrcov {

// Run fn(i) for i in [0, nitems) on up to nthreads workers.
//
// Work items are claimed through an atomic counter; each item must write only
// to its own output slot, so results are identical for any worker count.
// nthreads <= 1 runs the plain serial loop.
inline void parallel_for(std::int64_t nitems, int nthreads,
                         const std::function<void(std::int64_t)>& fn) {
  if (nthreads <= 1 || nitems <= 1) {
    for (std::int64_t i = 0; i < nitems; ++i) fn(i);
    return;
  }
  if (nthreads > nitems) nthreads = static_cast<int>(nitems);
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  std::mutex err_mtx;
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::int64_t i = next.fetch_add(1);
        if (i >= nitems || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mtx);
          if (!failed.exchange(true)) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load() && err) std::rethrow_exception(err);
}

} // namespace lrcov
