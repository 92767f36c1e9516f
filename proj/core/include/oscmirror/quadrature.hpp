#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscmirror {

/// Raised when an adaptive integral cannot reach its tolerance within the
/// interval budget. Carries the error estimate that was achieved.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

struct AdaptiveOptions {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;
  std::size_t max_intervals = 20000;
};

template <class T>
struct IntegrationResult {
  T value{};
  double abs_error = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1]; abscissae descending,
// the last entry is the centre.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod indices 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double lo;
  double hi;
  T value;
  double error;
  bool operator<(const Segment& other) const noexcept { return error < other.error; }
};

template <class T, class F>
Segment<T> gauss_kronrod_15(const F& f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const T fc = f(centre);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const T pair = f(centre - dx) + f(centre + dx);
    kronrod += pair * kKronrodWeights[i];
    if (i % 2 == 1) gauss += pair * kGaussWeights[i / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive G7/K15 integration: the interval with the largest
/// embedded error estimate is bisected until the summed estimate drops below
/// max(abs_tol, rel_tol |I|). `f` may return double or std::complex<double>.
template <class T, class F>
IntegrationResult<T> integrate_adaptive(const F& f, double lo, double hi,
                                        const AdaptiveOptions& opts = {}) {
  IntegrationResult<T> result;
  if (lo == hi) {
    result.converged = true;
    return result;
  }
  std::vector<detail::Segment<T>> heap;  // max-heap on the error estimate
  auto push = [&heap](detail::Segment<T> seg) {
    heap.push_back(std::move(seg));
    std::push_heap(heap.begin(), heap.end());
  };
  push(detail::gauss_kronrod_15<T>(f, lo, hi));
  T total = heap.front().value;
  double error = heap.front().error;

  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  // The running sums pick up cancellation error; re-sum exactly before
  // trusting them to stop.
  auto resum = [&] {
    total = T{};
    error = 0.0;
    for (const auto& seg : heap) {
      total += seg.value;
      error += seg.error;
    }
  };

  bool exhausted = false;
  while (!exhausted && heap.size() < opts.max_intervals) {
    if (!(error > tolerance())) {
      resum();
      if (!(error > tolerance())) break;
    }
    std::pop_heap(heap.begin(), heap.end());
    const auto worst = heap.back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      exhausted = true;  // interval exhausted at double precision
      break;
    }
    heap.pop_back();
    auto left = detail::gauss_kronrod_15<T>(f, worst.lo, mid);
    auto right = detail::gauss_kronrod_15<T>(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    push(std::move(left));
    push(std::move(right));
  }

  resum();
  result.intervals = heap.size();
  result.value = total;
  result.abs_error = error;
  result.converged = error <= tolerance();
  return result;
}

/// Like integrate_adaptive but throws QuadratureError on non-convergence.
template <class T, class F>
T integrate_or_throw(const F& f, double lo, double hi, const AdaptiveOptions& opts,
                     const char* what) {
  auto r = integrate_adaptive<T>(f, lo, hi, opts);
  if (!r.converged) {
    char buf[160];
    std::snprintf(buf, sizeof buf, ": adaptive quadrature did not converge (error %.3e after %zu intervals)",
                  r.abs_error, r.intervals);
    throw QuadratureError(std::string(what) + buf,
                          r.abs_error);
  }
  return r.value;
}

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t n);

}  // namespace oscmirror
