#include "oscmirror/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "oscmirror/rate.hpp"

namespace oscmirror {

namespace {

constexpr double kInvTwoPi = 0.5 * std::numbers::inv_pi;

struct Brackets {
  double b0, b1, b2, b3;
};

Brackets brackets_at(double U) {
  return {bracket(BracketKind::B0_random, U), bracket(BracketKind::B1_random_firstorder, U),
          bracket(BracketKind::B2_spectrum, U), bracket(BracketKind::B3_spectrum, U)};
}

double resting_phase(const PhysicalParams& p) { return 2.0 * (p.omega0 / p.c) * p.z0; }

}  // namespace

double sinc_kernel(double x, double t) noexcept {
  const double y = 0.5 * x * t;
  if (std::abs(y) < 1e-4) {
    const double y2 = y * y;
    return t * (1.0 - y2 / 6.0 + y2 * y2 / 120.0);
  }
  return std::sin(y) / (0.5 * x);
}

double h_kernel(HKernel which, double delta, double omega_p, double t) noexcept {
  switch (which) {
    case HKernel::h1: {
      const double s = sinc_kernel(delta, t);
      return std::sin(0.5 * omega_p * t) * s *
             (sinc_kernel(delta + omega_p, t) + sinc_kernel(delta - omega_p, t));
    }
    case HKernel::h2: {
      const double sp = sinc_kernel(delta + omega_p, t);
      const double sm = sinc_kernel(delta - omega_p, t);
      return sp * sp + sm * sm - 2.0 * std::cos(omega_p * t) * sp * sm;
    }
    case HKernel::h3: {
      const double s = sinc_kernel(delta, t);
      const double side =
          sinc_kernel(delta + 2.0 * omega_p, t) + sinc_kernel(delta - 2.0 * omega_p, t);
      return s * s - 0.5 * std::cos(omega_p * t) * s * side;
    }
  }
  return 0.0;
}

double spectrum_static(const PhysicalParams& p, double delta, double t) {
  const double s = sinc_kernel(delta, t);
  return kInvTwoPi * s * s * bracket(BracketKind::B0_random, resting_phase(p));
}

DynamicTerms spectrum_dynamic_terms(const PhysicalParams& p, double delta, double t) {
  DynamicTerms out;
  if (p.amplitude == 0.0) return out;
  const double k0 = p.omega0 / p.c;
  const Brackets b = brackets_at(resting_phase(p));
  const double ak0 = p.amplitude * k0;
  out.h1_term = kInvTwoPi * (p.amplitude / (2.0 * p.z0)) *
                h_kernel(HKernel::h1, delta, p.omega_p, t) * b.b1;
  out.h2_term = kInvTwoPi * (0.25 * ak0 * ak0) * h_kernel(HKernel::h2, delta, p.omega_p, t) * b.b2;
  out.h3_term = kInvTwoPi * (0.5 * ak0 * ak0) * h_kernel(HKernel::h3, delta, p.omega_p, t) * b.b3;
  return out;
}

double spectrum_dynamic(const PhysicalParams& p, double delta, double t) {
  return spectrum_dynamic_terms(p, delta, t).sum();
}

double mode_probability_second_order(ModeKind kind, double kz, const MirrorTrajectory& traj,
                                     double delta, double t) noexcept {
  const ExpansionCoeffs f = expansion_coeffs(kind, kz, traj.z0);
  const double a = traj.amplitude;
  const double s = sinc_kernel(delta, t);
  return f.f0 * f.f0 * s * s - a * f.f0 * f.f1 * h_kernel(HKernel::h1, delta, traj.omega_p, t) +
         0.25 * a * a * f.f1 * f.f1 * h_kernel(HKernel::h2, delta, traj.omega_p, t) +
         0.5 * a * a * f.f0 * f.f2 * h_kernel(HKernel::h3, delta, traj.omega_p, t);
}

SpectrumSeries spectrum_series(const PhysicalParams& p, const UniformGrid& detuning, double t,
                               unsigned workers) {
  detuning.validate("spectrum_series");
  if (!(t >= 0.0) || !std::isfinite(t)) throw GridError("spectrum_series: t must be >= 0");
  SpectrumSeries out;
  out.t = t;
  out.params = p;
  out.detunings = detuning.values();
  const std::size_t n = detuning.n;
  out.p_static.resize(n);
  out.p_dynamic.resize(n);
  out.p_total.resize(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const double d = out.detunings[i];
    out.p_static[i] = spectrum_static(p, d, t);
    out.p_dynamic[i] = spectrum_dynamic(p, d, t);
    out.p_total[i] = out.p_static[i] + out.p_dynamic[i];
  });
  out.negative_samples = static_cast<std::size_t>(
      std::count_if(out.p_total.begin(), out.p_total.end(), [](double v) { return v < 0.0; }));
  return out;
}

namespace {

// Centred sliding-window maximum, half-width `hw` samples, truncated at the
// ends. Monotone deque, O(n).
std::vector<double> running_max(const std::vector<double>& y, std::size_t hw) {
  const std::size_t n = y.size();
  std::vector<double> out(n);
  std::deque<std::size_t> window;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t right = std::min(n - 1, i + hw);
    while (next <= right) {
      while (!window.empty() && y[window.back()] <= y[next]) window.pop_back();
      window.push_back(next++);
    }
    const std::size_t left = i >= hw ? i - hw : 0;
    while (window.front() < left) window.pop_front();
    out[i] = y[window.front()];
  }
  return out;
}

}  // namespace

SpectrumSeries envelope(const SpectrumSeries& series) {
  const std::size_t n = series.size();
  if (n < 2) throw GridError("envelope: series needs at least 2 points");
  if (!(series.t > 0.0)) throw GridError("envelope: series time must be positive");
  const double span = series.detunings.back() - series.detunings.front();
  const double width = 4.0 * std::numbers::pi / series.t;
  if (width > span) throw GridError("envelope: smoothing window is wider than the grid");
  const double step = span / static_cast<double>(n - 1);
  const auto hw = static_cast<std::size_t>(std::llround(0.5 * width / step));

  SpectrumSeries out = series;
  out.p_total = running_max(series.p_total, hw);
  out.p_static = running_max(series.p_static, hw);
  for (std::size_t i = 0; i < n; ++i) out.p_dynamic[i] = out.p_total[i] - out.p_static[i];
  out.negative_samples = static_cast<std::size_t>(
      std::count_if(out.p_total.begin(), out.p_total.end(), [](double v) { return v < 0.0; }));
  return out;
}

std::string_view to_string(PeakClass c) noexcept {
  switch (c) {
    case PeakClass::central: return "central";
    case PeakClass::plus_wp: return "plus_wp";
    case PeakClass::minus_wp: return "minus_wp";
    case PeakClass::plus_2wp: return "plus_2wp";
    case PeakClass::minus_2wp: return "minus_2wp";
    case PeakClass::other: return "other";
  }
  return "other";
}

const Peak* PeakReport::find(PeakClass c) const noexcept {
  const Peak* best = nullptr;
  for (const auto& pk : peaks) {
    if (pk.cls == c && (best == nullptr || pk.prominence > best->prominence)) best = &pk;
  }
  return best;
}

namespace {

PeakClass classify(double offset, double omega_p, double tol) {
  const std::array<std::pair<double, PeakClass>, 5> expected = {{
      {0.0, PeakClass::central},
      {omega_p, PeakClass::plus_wp},
      {-omega_p, PeakClass::minus_wp},
      {2.0 * omega_p, PeakClass::plus_2wp},
      {-2.0 * omega_p, PeakClass::minus_2wp},
  }};
  PeakClass best = PeakClass::other;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& [where, cls] : expected) {
    // Strict improvement, so the central class wins the tie at wp = 0.
    const double dist = std::abs(offset - where);
    if (dist <= tol && dist < best_dist) {
      best = cls;
      best_dist = dist;
    }
  }
  return best;
}

// Linear interpolation of the abscissa where y crosses `level` between k and k+1.
double crossing(const std::vector<double>& x, const std::vector<double>& y, std::size_t k,
                double level) {
  const double dy = y[k + 1] - y[k];
  if (dy == 0.0) return x[k];
  return x[k] + (level - y[k]) * (x[k + 1] - x[k]) / dy;
}

}  // namespace

PeakReport find_peaks(const SpectrumSeries& env, double prominence_rel) {
  const std::size_t n = env.size();
  if (n == 0) throw GridError("find_peaks: empty series");
  const auto& x = env.detunings;
  const auto& y = env.p_total;
  PeakReport report;
  const double global_max = *std::max_element(y.begin(), y.end());
  if (!(global_max > 0.0) || n < 3) return report;

  const double tol = env.t > 0.0 ? 2.0 * std::numbers::pi / env.t : 0.0;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(y[i] > y[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && y[j + 1] == y[i]) ++j;
    if (j + 1 >= n || !(y[j + 1] < y[i])) {
      i = j + 1;
      continue;
    }
    const double h = y[i];
    double left_min = h;
    std::size_t k = i;
    while (k > 0 && y[k - 1] <= h) left_min = std::min(left_min, y[--k]);
    double right_min = h;
    k = j;
    while (k + 1 < n && y[k + 1] <= h) right_min = std::min(right_min, y[++k]);
    const double prominence = h - std::max(left_min, right_min);

    if (prominence >= prominence_rel * global_max) {
      const double level = h - 0.5 * prominence;
      std::size_t l = i;
      while (l > 0 && y[l - 1] > level) --l;
      const double x_left = l > 0 ? crossing(x, y, l - 1, level) : x.front();
      std::size_t r = j;
      while (r + 1 < n && y[r + 1] > level) ++r;
      const double x_right = r + 1 < n ? crossing(x, y, r, level) : x.back();

      Peak pk;
      pk.offset = 0.5 * (x[i] + x[j]);
      pk.height = h;
      pk.prominence = prominence;
      pk.prominence_rel = prominence / global_max;
      pk.fwhm = x_right - x_left;
      pk.cls = classify(pk.offset, env.params.omega_p, tol);
      report.peaks.push_back(pk);
    }
    i = j + 1;
  }

  auto ratio = [&report](PeakClass plus, PeakClass minus) -> std::optional<double> {
    const Peak* a = report.find(plus);
    const Peak* b = report.find(minus);
    if (a == nullptr || b == nullptr) return std::nullopt;
    return a->height / b->height;
  };
  report.ratio_wp = ratio(PeakClass::plus_wp, PeakClass::minus_wp);
  report.ratio_2wp = ratio(PeakClass::plus_2wp, PeakClass::minus_2wp);
  return report;
}

std::vector<SurfaceRow> spectrum_surface(const PhysicalParams& p, const UniformGrid& detuning,
                                         std::span<const double> times, unsigned workers) {
  detuning.validate("spectrum_surface");
  if (times.empty()) throw GridError("spectrum_surface: time grid is empty");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0.0) {
      throw GridError("spectrum_surface: times must be finite and >= 0");
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw GridError("spectrum_surface: times must be strictly ascending");
    }
  }
  const std::size_t n = detuning.n;
  std::vector<SurfaceRow> rows(times.size() * n);
  const std::vector<double> deltas = detuning.values();
  parallel_for(rows.size(), workers, [&](std::size_t idx) {
    const double t = times[idx / n];
    const double d = deltas[idx % n];
    rows[idx] = {t, d, spectrum_static(p, d, t) + spectrum_dynamic(p, d, t)};
  });
  return rows;
}

}  // namespace oscmirror
