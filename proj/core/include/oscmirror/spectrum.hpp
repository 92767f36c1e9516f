#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "oscmirror/grid.hpp"
#include "oscmirror/modes.hpp"
#include "oscmirror/params.hpp"

namespace oscmirror {

/// Finite-time resonance factor sin(x t / 2) / (x / 2); equals t at x = 0.
double sinc_kernel(double x, double t) noexcept;

enum class HKernel { h1, h2, h3 };

/// Motion-induced lineshape kernels, all in s^2:
///   h1 = sin(wp t/2) s(D) [s(D+wp) + s(D-wp)]
///   h2 = s(D+wp)^2 + s(D-wp)^2 - 2 cos(wp t) s(D+wp) s(D-wp)
///   h3 = s(D)^2 - cos(wp t) s(D) [s(D+2wp) + s(D-2wp)] / 2
/// with s = sinc_kernel and D the detuning.
double h_kernel(HKernel which, double delta, double omega_p, double t) noexcept;

/// Static-mirror spectral density (1/2pi) s(D,t)^2 B0(U0), in units of A21
/// per rad/s (i.e. A21 s^2 / rad). Randomly oriented dipole.
double spectrum_static(const PhysicalParams& p, double delta, double t);

/// The three motion-induced contributions, kept separate so the order in the
/// amplitude can be checked term by term.
struct DynamicTerms {
  double h1_term = 0.0;  // first order in amplitude
  double h2_term = 0.0;  // second order
  double h3_term = 0.0;  // second order
  double sum() const noexcept { return h1_term + h2_term + h3_term; }
};

DynamicTerms spectrum_dynamic_terms(const PhysicalParams& p, double delta, double t);

double spectrum_dynamic(const PhysicalParams& p, double delta, double t);

/// Per-mode emission probability truncated at second order in the amplitude
/// (|amplitude|^2 up to a^2), for a single scalar profile with wavevector
/// z-component kz. Normalized so that the static limit is f0^2 s(D,t)^2.
double mode_probability_second_order(ModeKind kind, double kz, const MirrorTrajectory& traj,
                                     double delta, double t) noexcept;

struct SpectrumSeries {
  std::vector<double> detunings;  // rad/s, ascending
  std::vector<double> p_static;
  std::vector<double> p_dynamic;
  std::vector<double> p_total;
  double t = 0.0;
  PhysicalParams params;
  std::size_t negative_samples = 0;  // p_total < 0 (perturbative breakdown)

  std::size_t size() const noexcept { return detunings.size(); }
};

SpectrumSeries spectrum_series(const PhysicalParams& p, const UniformGrid& detuning, double t,
                               unsigned workers = 1);

/// Running maximum over a centred window of width 4 pi / t. The returned
/// series carries the envelope in p_total and the envelope of the static part
/// in p_static; p_dynamic is their difference.
SpectrumSeries envelope(const SpectrumSeries& series);

enum class PeakClass { central, plus_wp, minus_wp, plus_2wp, minus_2wp, other };

std::string_view to_string(PeakClass c) noexcept;

struct Peak {
  double offset = 0.0;          // rad/s
  double height = 0.0;
  double prominence = 0.0;      // absolute, same units as height
  double prominence_rel = 0.0;  // prominence / global maximum
  double fwhm = 0.0;            // width at half prominence, rad/s
  PeakClass cls = PeakClass::other;
};

struct PeakReport {
  std::vector<Peak> peaks;             // sorted by offset
  std::optional<double> ratio_wp;      // height(+wp) / height(-wp)
  std::optional<double> ratio_2wp;     // height(+2wp) / height(-2wp)

  const Peak* find(PeakClass c) const noexcept;
};

/// Local maxima (plateaus included) whose topographic prominence is at least
/// `prominence_rel` times the global maximum, classified against 0, +-wp and
/// +-2wp with tolerance 2 pi / t.
PeakReport find_peaks(const SpectrumSeries& env, double prominence_rel = 0.02);

struct SurfaceRow {
  double t = 0.0;
  double delta = 0.0;
  double p_total = 0.0;
};

/// Long-format (t, delta, p_total) table, row-major over (t, delta).
std::vector<SurfaceRow> spectrum_surface(const PhysicalParams& p, const UniformGrid& detuning,
                                         std::span<const double> times, unsigned workers = 1);

}  // namespace oscmirror
