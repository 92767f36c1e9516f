#pragma once

#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "oscmirror/grid.hpp"
#include "oscmirror/params.hpp"
#include "oscmirror/quadrature.hpp"

namespace oscmirror {

/// Closed-form solid-angle and polarization averages, all functions of the
/// round-trip phase U = 2 k0 z:
///
///   B0  random-orientation rate near a static mirror
///   B1  first-order response of B0 to a displacement, B1 = -U dB0/dU
///   B2  weight of the |f1|^2 (h2) spectral channel
///   B3  weight of the f0 f2 (h3) spectral channel, B2 - 2/3
///   R_parallel, R_perpendicular  per-component rates, free space -> 1
enum class BracketKind {
  B0_random,
  B1_random_firstorder,
  B2_spectrum,
  B3_spectrum,
  R_parallel,
  R_perpendicular,
};

inline constexpr BracketKind kAllBrackets[] = {
    BracketKind::B0_random,   BracketKind::B1_random_firstorder, BracketKind::B2_spectrum,
    BracketKind::B3_spectrum, BracketKind::R_parallel,           BracketKind::R_perpendicular,
};

std::string_view to_string(BracketKind kind) noexcept;

/// Below this phase every bracket is evaluated from its power series.
inline constexpr double kBracketSeriesThreshold = 0.5;

/// Dispatches to the series branch for U < kBracketSeriesThreshold and to the
/// closed form otherwise.
double bracket(BracketKind kind, double U);

/// The trigonometric closed form. Loses accuracy to cancellation as U -> 0.
double bracket_closed_form(BracketKind kind, double U);

/// Power series in U^2, summed until the terms fall below double precision.
/// Accurate for U up to a few units.
double bracket_series(BracketKind kind, double U);

class UnsupportedOrientation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Instantaneous phase 2 k0 z(t) for the sinusoidal trajectory.
double instantaneous_phase(const PhysicalParams& p, double t) noexcept;

/// Gamma/A21 at time t: the static-mirror rate evaluated at the instantaneous
/// distance. Random orientation uses B0, x/y use R_parallel, z uses
/// R_perpendicular.
double rate_exact(const PhysicalParams& p, double t);

/// First order in amplitude/z0 about the mean position. Only defined for the
/// random orientation.
double rate_first_order(const PhysicalParams& p, double t);

/// Integral of Gamma/A21 over [0, t], in seconds (multiply by A21 for the
/// decay probability). Throws QuadratureError on non-convergence.
double decay_probability(const PhysicalParams& p, double t,
                         const AdaptiveOptions& opts = {.rel_tol = 1e-9, .abs_tol = 0.0});

enum class RateOrder { exact, first_order };

struct RateSeries {
  std::vector<double> times;   // s, ascending
  std::vector<double> values;  // Gamma / A21
  Orientation orientation = Orientation::random;
  RateOrder order = RateOrder::exact;
};

RateSeries rate_series(const PhysicalParams& p, double t_start, double t_end,
                       std::size_t n_points, RateOrder order, unsigned workers = 1);

}  // namespace oscmirror
