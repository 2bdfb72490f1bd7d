#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cdu {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Caller broke a documented precondition (dimension mismatch, ill-typed wiring, ...).
struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Numeric machinery failed (non-monotone loop map, rejection budget exhausted, ...).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad run configuration or catalog input.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw contract_error(msg);
}

// Runs fn(i) for i in [0, n). Work is split into static contiguous ranges so the
// result of fn never depends on the worker count; fn must write only to slot i.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex guard;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(guard);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cdu
