#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace oscmirror {

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// n equally spaced samples covering [lo, hi] inclusive. Points mirrored
/// about the centre of a symmetric grid are exact negatives of each other.
struct UniformGrid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;

  void validate(const char* what) const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw GridError(std::string(what) + ": grid requires finite lo < hi");
    }
    if (n < 2) throw GridError(std::string(what) + ": grid requires at least 2 points");
  }

  double step() const noexcept { return (hi - lo) / static_cast<double>(n - 1); }

  double operator[](std::size_t i) const noexcept {
    const auto m = static_cast<double>(n - 1);
    return (lo * (m - static_cast<double>(i)) + hi * static_cast<double>(i)) / m;
  }

  std::vector<double> values() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (*this)[i];
    return out;
  }
};

inline unsigned resolve_workers(unsigned workers) noexcept {
  if (workers != 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = all cores).
/// Each index is visited exactly once; callers write to disjoint slots.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& fn) {
  const std::size_t threads = std::min<std::size_t>(resolve_workers(workers), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace oscmirror
