#include "oscmirror/modes.hpp"

namespace oscmirror {

double mode_scalar(ModeKind kind, double kz, double z) noexcept {
  const double phase = kz * z;
  return is_parallel(kind) ? std::sin(phase) : std::cos(phase);
}

ExpansionCoeffs expansion_coeffs(ModeKind kind, double kz, double z0) noexcept {
  const double phase = kz * z0;
  const double s = std::sin(phase);
  const double c = std::cos(phase);
  ExpansionCoeffs out;
  if (is_parallel(kind)) {
    out.f0 = s;
    out.f1 = kz * c;
  } else {
    out.f0 = c;
    out.f1 = -kz * s;
  }
  out.f2 = -kz * kz * out.f0;
  return out;
}

double mode_at_time(ModeKind kind, double kz, const MirrorTrajectory& traj, double t,
                    ExpansionOrder order) noexcept {
  if (order == ExpansionOrder::exact) {
    return mode_scalar(kind, kz, traj.position(t));
  }
  const ExpansionCoeffs f = expansion_coeffs(kind, kz, traj.z0);
  const double d = traj.displacement(t);
  // z(t) = z0 - d, so the odd term flips sign.
  return f.f0 - f.f1 * d + 0.5 * f.f2 * d * d;
}

}  // namespace oscmirror
