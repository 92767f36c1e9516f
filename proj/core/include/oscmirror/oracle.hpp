#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "oscmirror/modes.hpp"
#include "oscmirror/params.hpp"
#include "oscmirror/quadrature.hpp"
#include "oscmirror/rate.hpp"

/// Brute-force cross-checks for the closed forms in rate and spectrum. Nothing
/// here calls the closed-form brackets or h-kernels on the quadrature side;
/// everything is rebuilt from mode functions, the transverse projector and
/// direct time integration of the emission amplitude.
namespace oscmirror::oracle {

/// Propagation direction of an emitted photon.
struct Direction {
  double theta = 0.0;  ///< polar angle from the mirror normal, [0, pi]
  double phi = 0.0;    ///< azimuth, [0, 2 pi)

  std::array<double, 3> unit() const noexcept;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Sum over the two transverse polarizations of e_l e_m: delta_lm - k_l k_m.
Matrix3 polarization_tensor(const Direction& dir) noexcept;

/// Mean-square of the transverse mode factor in the continuum limit.
inline constexpr double kTransverseWeight = 2.0;

struct AngularResult {
  double value = 0.0;    ///< quadrature with 2 n nodes in cos(theta)
  double coarse = 0.0;   ///< same with n nodes
  std::size_t nodes = 0; ///< 2 n
  bool converged = false;
};

/// Re-derives a bracket by integrating the squared mode profiles (or their
/// z0-derivatives) over the full solid angle, weighted by the projector and
/// normalized by the free-space integral. Gauss-Legendre in cos(theta) with
/// `n_nodes` and 2 `n_nodes` points; a uniform azimuth rule that is exact for
/// the cos^2(phi) dependence.
AngularResult angular_bracket_quadrature(BracketKind kind, double U, std::size_t n_nodes = 128);

/// int_{t_begin}^{t_end} f(z(t')) exp(i delta t') dt' with the exact
/// sinusoidal trajectory, by adaptive Gauss-Kronrod on the complex integrand.
std::complex<double> mode_amplitude(ModeKind kind, double kz, const MirrorTrajectory& traj,
                                    double delta, double t_begin, double t_end,
                                    double rel_tol = 1e-12);

/// Polarization-summed per-mode probability for wavevector magnitude k along
/// `dir` (detuning c k - omega0), using the exact trajectory. Normalized like
/// mode_probability_second_order: sum_l w_l P_ll 2 |amplitude_l|^2 with w_l
/// the dipole weights of p.orientation.
double exact_mode_probability(const PhysicalParams& p, const Direction& dir, double k, double t,
                              double rel_tol = 1e-12);

/// Same mode, same weights, second-order expansion in the amplitude.
double expanded_mode_probability(const PhysicalParams& p, const Direction& dir, double k,
                                 double t);

/// Randomly oriented spectral density at detuning delta assembled from
/// exact_mode_probability-style amplitudes over the solid angle at the
/// resonant wavenumber, in units of A21 per rad/s.
double spectrum_by_quadrature(const PhysicalParams& p, double delta, double t,
                              std::size_t n_nodes = 128, double rel_tol = 1e-11,
                              unsigned workers = 1);

/// int_{-W}^{W} g(delta) d delta with W = 400 pi / t, in panels of one
/// finite-time linewidth 2 pi / t.
double integrate_over_detuning(const std::function<double(double)>& g, double t,
                               double window_factor = 400.0);

struct OracleReport {
  std::string name;
  double closed_form = 0.0;
  double quadrature = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t nodes = 0;
};

using BracketFn = std::function<double(BracketKind, double)>;

struct SuiteOptions {
  double t = 1e-6;                  ///< emission time for spectrum checks [s]
  std::size_t angular_nodes = 128;  ///< base Gauss-Legendre order
  BracketFn closed_form = [](BracketKind k, double U) { return bracket(k, U); };
  unsigned workers = 1;
};

inline constexpr std::array<double, 7> kSuitePhases = {
    0.1, 0.5, 1.0, 3.141592653589793, 6.283185307179586, 10.0, 50.0};

/// Runs every oracle comparison; failures are reported, never thrown.
std::vector<OracleReport> run_validation_suite(const PhysicalParams& p,
                                               const SuiteOptions& opts = {});

}  // namespace oscmirror::oracle
