#pragma once

#include <cmath>

#include "oscmirror/params.hpp"

namespace oscmirror {

/// Scalar z-profile carried by each Cartesian component of a mode near the
/// mirror: sine for the tangential components (vanishing at the surface),
/// cosine for the normal one.
enum class ModeKind { parallel_x, parallel_y, perpendicular_z };

constexpr bool is_parallel(ModeKind kind) noexcept {
  return kind != ModeKind::perpendicular_z;
}

/// Mirror surface follows a(t) = amplitude sin(omega_p t); the atom sits at
/// z0 from the mean mirror position, so the instantaneous gap is
/// z(t) = z0 - amplitude sin(omega_p t).
struct MirrorTrajectory {
  double z0 = 0.0;
  double amplitude = 0.0;
  double omega_p = 0.0;

  static MirrorTrajectory from(const PhysicalParams& p) noexcept {
    return {p.z0, p.amplitude, p.omega_p};
  }

  double displacement(double t) const noexcept { return amplitude * std::sin(omega_p * t); }
  double position(double t) const noexcept { return z0 - displacement(t); }
};

/// sin(kz z) for parallel kinds, cos(kz z) for the perpendicular kind.
double mode_scalar(ModeKind kind, double kz, double z) noexcept;

/// Taylor coefficients of the scalar profile about z0:
/// f(z0 + dz) = f0 + f1 dz + f2 dz^2 / 2 + ...
struct ExpansionCoeffs {
  double f0 = 0.0;  // dimensionless
  double f1 = 0.0;  // 1/m
  double f2 = 0.0;  // 1/m^2, always -kz^2 f0
};

ExpansionCoeffs expansion_coeffs(ModeKind kind, double kz, double z0) noexcept;

enum class ExpansionOrder { exact, second_order };

/// Scalar profile seen by the atom at time t. `second_order` truncates the
/// expansion in the oscillation amplitude after a^2.
double mode_at_time(ModeKind kind, double kz, const MirrorTrajectory& traj, double t,
                    ExpansionOrder order) noexcept;

}  // namespace oscmirror
