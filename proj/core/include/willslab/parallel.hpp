#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace wills {

/// Run `work(stream_index)` for stream_index in [0, n_streams) on up to
/// `threads` workers. Results land in a vector indexed by stream, so any later
/// reduction that walks that vector in order is independent of scheduling and
/// of the thread count.
template <typename T>
std::vector<T> run_streams(std::size_t n_streams, int threads,
                           const std::function<T(std::size_t)>& work) {
  std::vector<T> results(n_streams);
  if (n_streams == 0) return results;
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(n_streams)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n_streams; ++i) results[i] = work(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_streams) return;
        try {
          results[i] = work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

/// Split n items over n_streams: first streams get the remainder.
inline std::size_t stream_chunk(std::size_t n, std::size_t n_streams,
                                std::size_t stream) {
  return n / n_streams + (stream < n % n_streams ? 1 : 0);
}

} // namespace wills
