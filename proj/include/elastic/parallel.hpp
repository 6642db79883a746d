#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace elastic {

/// Worker count used when a caller passes 0.
inline unsigned default_workers() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs body(begin, end, worker) over contiguous chunks of [0, n). Each chunk
/// is owned by exactly one worker; the first exception thrown is rethrown.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    body(std::size_t{0}, n, 0u);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, w);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Unordered pair (i, j), i < j, for the k-th entry of the upper triangle.
struct IndexPair {
  std::size_t i;
  std::size_t j;
};

inline std::vector<IndexPair> upper_triangle_pairs(std::size_t n) {
  std::vector<IndexPair> out;
  out.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back({i, j});
  return out;
}

}  // namespace elastic
