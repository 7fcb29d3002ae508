#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace srgeo {

/// Evaluates fn(i) for i in [0, n) on up to `jobs` threads. Results are stored
/// by index, so the output does not depend on scheduling. The exception from
/// the lowest failing index is rethrown.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, unsigned jobs, Fn&& fn) {
  std::vector<Result> out(n);
  if (n == 0) return out;
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace srgeo
