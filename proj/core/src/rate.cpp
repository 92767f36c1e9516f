#include "oscmirror/rate.hpp"

#include <cmath>

namespace oscmirror {

namespace {

constexpr double kThird = 1.0 / 3.0;

// Sums sum_{n>=1} (-1)^n U^{2n} / (2n)! * weight(n) until the terms vanish
// at double precision. U is assumed small (series branch only).
template <class Weight>
double alternating_series(double U, Weight weight) {
  const double u2 = U * U;
  double power = 1.0;  // U^{2n} / (2n)!
  double sum = 0.0;
  for (int n = 1; n <= 40; ++n) {
    power *= -u2 / static_cast<double>((2 * n - 1) * (2 * n));
    const double term = power * weight(n);
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double inv(int k) { return 1.0 / static_cast<double>(k); }

}  // namespace

std::string_view to_string(BracketKind kind) noexcept {
  switch (kind) {
    case BracketKind::B0_random: return "B0_random";
    case BracketKind::B1_random_firstorder: return "B1_random_firstorder";
    case BracketKind::B2_spectrum: return "B2_spectrum";
    case BracketKind::B3_spectrum: return "B3_spectrum";
    case BracketKind::R_parallel: return "R_parallel";
    case BracketKind::R_perpendicular: return "R_perpendicular";
  }
  return "unknown";
}

double bracket_closed_form(BracketKind kind, double U) {
  const double s = std::sin(U);
  const double c = std::cos(U);
  const double u1 = 1.0 / U;
  const double u2 = u1 * u1;
  const double u3 = u2 * u1;
  switch (kind) {
    case BracketKind::B0_random:
      return 1.0 - s * u1 - 2.0 * c * u2 + 2.0 * s * u3;
    case BracketKind::B1_random_firstorder:
      return c - 3.0 * s * u1 - 6.0 * c * u2 + 6.0 * s * u3;
    case BracketKind::B2_spectrum:
    case BracketKind::B3_spectrum: {
      const double u4 = u2 * u2;
      const double u5 = u4 * u1;
      const double osc = s * u1 + 4.0 * c * u2 - 12.0 * s * u3 - 24.0 * c * u4 + 24.0 * s * u5;
      return (kind == BracketKind::B2_spectrum ? kThird : -kThird) + osc;
    }
    case BracketKind::R_parallel:
      return 1.0 - 1.5 * (s * u1 + c * u2 - s * u3);
    case BracketKind::R_perpendicular:
      return 1.0 - 3.0 * (c * u2 - s * u3);
  }
  throw std::invalid_argument("bracket_closed_form: unknown kind");
}

// Every bracket is a combination of the moments
//   M_m(U) = 1/2 int_{-1}^{1} u^{2m} cos(U u) du
//          = sum_n (-1)^n U^{2n} / ((2n)! (2n + 2m + 1)),
// e.g. B0 = 1 - M_1 and B2 = 1/3 + M_2, so the constant terms are carried
// exactly and only the U-dependent tail is summed.
double bracket_series(BracketKind kind, double U) {
  switch (kind) {
    case BracketKind::B0_random:
      return 2.0 * kThird - alternating_series(U, [](int n) { return inv(2 * n + 3); });
    case BracketKind::B1_random_firstorder:
      return alternating_series(U, [](int n) { return (2.0 * n) * inv(2 * n + 3); });
    case BracketKind::B2_spectrum:
      return kThird + 0.2 + alternating_series(U, [](int n) { return inv(2 * n + 5); });
    case BracketKind::B3_spectrum:
      return -kThird + 0.2 + alternating_series(U, [](int n) { return inv(2 * n + 5); });
    case BracketKind::R_parallel:
      return -0.75 * alternating_series(U, [](int n) { return inv(2 * n + 1) + inv(2 * n + 3); });
    case BracketKind::R_perpendicular:
      return 2.0 + 1.5 * alternating_series(U, [](int n) { return inv(2 * n + 1) - inv(2 * n + 3); });
  }
  throw std::invalid_argument("bracket_series: unknown kind");
}

double bracket(BracketKind kind, double U) {
  return U < kBracketSeriesThreshold ? bracket_series(kind, U) : bracket_closed_form(kind, U);
}

double instantaneous_phase(const PhysicalParams& p, double t) noexcept {
  const double k0 = p.omega0 / p.c;
  return 2.0 * k0 * (p.z0 - p.amplitude * std::sin(p.omega_p * t));
}

double rate_exact(const PhysicalParams& p, double t) {
  const double U = instantaneous_phase(p, t);
  switch (p.orientation) {
    case Orientation::x:
    case Orientation::y: return bracket(BracketKind::R_parallel, U);
    case Orientation::z: return bracket(BracketKind::R_perpendicular, U);
    case Orientation::random: return bracket(BracketKind::B0_random, U);
  }
  return bracket(BracketKind::B0_random, U);
}

double rate_first_order(const PhysicalParams& p, double t) {
  if (p.orientation != Orientation::random) {
    throw UnsupportedOrientation(
        "rate_first_order: the first-order expansion is defined for random orientation only");
  }
  const double U0 = 2.0 * (p.omega0 / p.c) * p.z0;
  return bracket(BracketKind::B0_random, U0) +
         (p.amplitude / p.z0) * std::sin(p.omega_p * t) *
             bracket(BracketKind::B1_random_firstorder, U0);
}

double decay_probability(const PhysicalParams& p, double t, const AdaptiveOptions& opts) {
  if (!(t >= 0.0)) throw std::invalid_argument("decay_probability: t must be >= 0");
  if (t == 0.0) return 0.0;
  AdaptiveOptions local = opts;
  // The integrand is O(1); the floor is 1e-14 in integrand units per second.
  local.abs_tol = std::max(opts.abs_tol, 1e-14 * t);
  return integrate_or_throw<double>([&p](double s) { return rate_exact(p, s); }, 0.0, t, local,
                                    "decay_probability");
}

RateSeries rate_series(const PhysicalParams& p, double t_start, double t_end,
                       std::size_t n_points, RateOrder order, unsigned workers) {
  const UniformGrid grid{t_start, t_end, n_points};
  grid.validate("rate_series");
  if (order == RateOrder::first_order && p.orientation != Orientation::random) {
    throw UnsupportedOrientation("rate_series: first-order series requires random orientation");
  }
  RateSeries series;
  series.orientation = p.orientation;
  series.order = order;
  series.times = grid.values();
  series.values.resize(n_points);
  parallel_for(n_points, workers, [&](std::size_t i) {
    const double t = series.times[i];
    series.values[i] = order == RateOrder::exact ? rate_exact(p, t) : rate_first_order(p, t);
  });
  return series;
}

}  // namespace oscmirror
