#include "oscmirror/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "oscmirror/grid.hpp"
#include "oscmirror/spectrum.hpp"

namespace oscmirror::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kAzimuthNodes = 8;
constexpr std::array<ModeKind, 3> kAxes = {ModeKind::parallel_x, ModeKind::parallel_y,
                                           ModeKind::perpendicular_z};

std::array<double, 3> dipole_weights(Orientation o) {
  switch (o) {
    case Orientation::x: return {1.0, 0.0, 0.0};
    case Orientation::y: return {0.0, 1.0, 0.0};
    case Orientation::z: return {0.0, 0.0, 1.0};
    case Orientation::random: break;
  }
  return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
}

// Which Cartesian components a bracket averages over.
std::array<double, 3> bracket_weights(BracketKind kind) {
  switch (kind) {
    case BracketKind::R_parallel: return dipole_weights(Orientation::x);
    case BracketKind::R_perpendicular: return dipole_weights(Orientation::z);
    default: return dipole_weights(Orientation::random);
  }
}

// Mode-profile combination whose angular average gives the bracket, with the
// atom at z0 = 1 and k0 = U / 2 so that 2 k0 z0 = U.
double bracket_integrand(BracketKind kind, ModeKind axis, double k0, double cos_theta) {
  constexpr double z0 = 1.0;
  const ExpansionCoeffs f = expansion_coeffs(axis, k0 * cos_theta, z0);
  switch (kind) {
    case BracketKind::B0_random:
    case BracketKind::R_parallel:
    case BracketKind::R_perpendicular: return f.f0 * f.f0;
    case BracketKind::B1_random_firstorder: return -2.0 * z0 * f.f0 * f.f1;
    case BracketKind::B2_spectrum: return f.f1 * f.f1 / (k0 * k0);
    case BracketKind::B3_spectrum: return f.f0 * f.f2 / (k0 * k0);
  }
  return 0.0;
}

double angular_average(BracketKind kind, double U, const GaussLegendreRule& rule) {
  const double k0 = 0.5 * U;
  const auto weights = bracket_weights(kind);
  double numerator = 0.0;
  double free_space = 0.0;
  const double dphi = 2.0 * kPi / static_cast<double>(kAzimuthNodes);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = rule.nodes[i];
    const double theta = std::acos(u);
    std::array<double, 3> profile{};
    for (std::size_t l = 0; l < 3; ++l) profile[l] = bracket_integrand(kind, kAxes[l], k0, u);
    for (std::size_t j = 0; j < kAzimuthNodes; ++j) {
      const Matrix3 P = polarization_tensor({theta, (static_cast<double>(j) + 0.5) * dphi});
      const double w = rule.weights[i] * dphi;
      for (std::size_t l = 0; l < 3; ++l) {
        numerator += w * weights[l] * P[l][l] * kTransverseWeight * profile[l];
        free_space += w * weights[l] * P[l][l];
      }
    }
  }
  return numerator / free_space;
}

double relative_error(double reference, double value) {
  const double diff = std::abs(value - reference);
  if (diff == 0.0) return 0.0;
  return diff / std::abs(reference);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::array<double, 3> Direction::unit() const noexcept {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

Matrix3 polarization_tensor(const Direction& dir) noexcept {
  const auto k = dir.unit();
  Matrix3 P{};
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t m = 0; m < 3; ++m) P[l][m] = (l == m ? 1.0 : 0.0) - k[l] * k[m];
  }
  return P;
}

AngularResult angular_bracket_quadrature(BracketKind kind, double U, std::size_t n_nodes) {
  if (!(U >= 0.0)) throw std::invalid_argument("angular_bracket_quadrature: U must be >= 0");
  if (n_nodes == 0) throw std::invalid_argument("angular_bracket_quadrature: n_nodes must be > 0");
  AngularResult r;
  r.coarse = angular_average(kind, U, gauss_legendre(n_nodes));
  r.value = angular_average(kind, U, gauss_legendre(2 * n_nodes));
  r.nodes = 2 * n_nodes;
  const double scale = std::max(std::abs(r.value), 1e-300);
  r.converged = std::abs(r.value - r.coarse) <= 1e-11 * scale + 1e-15;
  return r;
}

std::complex<double> mode_amplitude(ModeKind kind, double kz, const MirrorTrajectory& traj,
                                    double delta, double t_begin, double t_end, double rel_tol) {
  auto integrand = [&](double s) {
    const double f = mode_scalar(kind, kz, traj.position(s));
    return std::complex<double>(f * std::cos(delta * s), f * std::sin(delta * s));
  };
  // Off resonance the amplitude can cancel to far below the duration, and
  // summation rounding over many mirror periods sets a floor. 1e-12 of the
  // on-resonance scale (~ duration) is well inside every oracle tolerance.
  const AdaptiveOptions opts{
      .rel_tol = rel_tol, .abs_tol = 1e-12 * std::abs(t_end - t_begin), .max_intervals = 200000};
  return integrate_or_throw<std::complex<double>>(integrand, t_begin, t_end, opts,
                                                  "mode_amplitude");
}

namespace {

template <class PerAxis>
double weighted_mode_sum(const PhysicalParams& p, const Direction& dir, PerAxis per_axis) {
  const Matrix3 P = polarization_tensor(dir);
  const auto w = dipole_weights(p.orientation);
  double total = 0.0;
  for (std::size_t l = 0; l < 3; ++l) {
    if (w[l] == 0.0) continue;
    total += w[l] * P[l][l] * kTransverseWeight * per_axis(kAxes[l]);
  }
  return total;
}

}  // namespace

double exact_mode_probability(const PhysicalParams& p, const Direction& dir, double k, double t,
                              double rel_tol) {
  const MirrorTrajectory traj = MirrorTrajectory::from(p);
  const double delta = p.c * k - p.omega0;
  const double kz = k * std::cos(dir.theta);
  return weighted_mode_sum(p, dir, [&](ModeKind axis) {
    return std::norm(mode_amplitude(axis, kz, traj, delta, 0.0, t, rel_tol));
  });
}

double expanded_mode_probability(const PhysicalParams& p, const Direction& dir, double k,
                                 double t) {
  const MirrorTrajectory traj = MirrorTrajectory::from(p);
  const double delta = p.c * k - p.omega0;
  const double kz = k * std::cos(dir.theta);
  return weighted_mode_sum(p, dir, [&](ModeKind axis) {
    return mode_probability_second_order(axis, kz, traj, delta, t);
  });
}

double spectrum_by_quadrature(const PhysicalParams& p, double delta, double t,
                              std::size_t n_nodes, double rel_tol, unsigned workers) {
  const MirrorTrajectory traj = MirrorTrajectory::from(p);
  const double k0 = p.omega0 / p.c;
  const GaussLegendreRule rule = gauss_legendre(n_nodes);
  const auto w = dipole_weights(Orientation::random);
  const double dphi = 2.0 * kPi / static_cast<double>(kAzimuthNodes);

  std::vector<double> numerator(n_nodes, 0.0);
  std::vector<double> free_space(n_nodes, 0.0);
  parallel_for(n_nodes, workers, [&](std::size_t i) {
    const double u = rule.nodes[i];
    const double theta = std::acos(u);
    const double kz = k0 * u;
    const double par =
        std::norm(mode_amplitude(ModeKind::parallel_x, kz, traj, delta, 0.0, t, rel_tol));
    const double perp =
        std::norm(mode_amplitude(ModeKind::perpendicular_z, kz, traj, delta, 0.0, t, rel_tol));
    const std::array<double, 3> prob = {par, par, perp};
    for (std::size_t j = 0; j < kAzimuthNodes; ++j) {
      const Matrix3 P = polarization_tensor({theta, (static_cast<double>(j) + 0.5) * dphi});
      const double weight = rule.weights[i] * dphi;
      for (std::size_t l = 0; l < 3; ++l) {
        numerator[i] += weight * w[l] * P[l][l] * kTransverseWeight * prob[l];
        free_space[i] += weight * w[l] * P[l][l];
      }
    }
  });
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    num += numerator[i];
    den += free_space[i];
  }
  return num / den / (2.0 * kPi);
}

double integrate_over_detuning(const std::function<double(double)>& g, double t,
                               double window_factor) {
  if (!(t > 0.0)) throw std::invalid_argument("integrate_over_detuning: t must be positive");
  const double width = window_factor * kPi / t;
  const auto panels = static_cast<std::size_t>(std::ceil(window_factor));
  const double panel = 2.0 * width / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = -width + panel * static_cast<double>(i);
    const double hi = i + 1 == panels ? width : lo + panel;
    const AdaptiveOptions opts{.rel_tol = 1e-11, .abs_tol = 0.0, .max_intervals = 2000};
    auto r = integrate_adaptive<double>(g, lo, hi, opts);
    total += r.value;
  }
  return total;
}

std::vector<OracleReport> run_validation_suite(const PhysicalParams& p, const SuiteOptions& opts) {
  std::vector<OracleReport> reports;
  auto push = [&reports](std::string name, double closed, double quad, double tol,
                         std::size_t nodes, bool extra_ok = true) {
    OracleReport r;
    r.name = std::move(name);
    r.closed_form = closed;
    r.quadrature = quad;
    r.abs_error = std::abs(quad - closed);
    r.rel_error = relative_error(closed, quad);
    r.tolerance = tol;
    r.pass = extra_ok && std::isfinite(r.rel_error) && r.rel_error <= tol;
    r.nodes = nodes;
    reports.push_back(std::move(r));
  };

  // 1. Closed-form brackets against solid-angle quadrature.
  for (BracketKind kind : kAllBrackets) {
    for (double U : kSuitePhases) {
      const auto q = angular_bracket_quadrature(kind, U, opts.angular_nodes);
      push("bracket/" + std::string(to_string(kind)) + "/U=" + format_number(U),
           opts.closed_form(kind, U), q.value, 1e-8, q.nodes, q.converged);
    }
  }

  PhysicalParams random = p;
  random.orientation = Orientation::random;
  const double k0 = p.omega0 / p.c;

  // 2. First-order rate: the max residual must be quadratic in amplitude.
  {
    auto residual = [&](double a) {
      if (a == 0.0 || p.omega_p == 0.0) return 0.0;
      PhysicalParams q = random;
      q.amplitude = a;
      const double period = 2.0 * kPi / p.omega_p;
      double worst = 0.0;
      for (std::size_t i = 0; i <= 4096; ++i) {
        const double t = period * static_cast<double>(i) / 4096.0;
        worst = std::max(worst, std::abs(rate_exact(q, t) - rate_first_order(q, t)));
      }
      return worst;
    };
    const double r1 = residual(p.amplitude);
    const double r2 = residual(0.5 * p.amplitude);
    const double ratio = r2 > 0.0 ? r1 / r2 : (r1 == 0.0 ? 4.0 : INFINITY);
    push("scaling/rate_first_order_halving", 4.0, ratio, 0.2, 4097);
  }

  // 3. Per-mode exact amplitude against the second-order expansion: the
  //    residual must be cubic in amplitude. Evaluated at omega_p t = 1, where
  //    the odd-order terms are not suppressed by the period average.
  {
    struct Point {
      double cos_theta, phi, delta_over_wp;
    };
    constexpr std::array<Point, 5> points = {{{0.3, 0.4, 0.0},
                                              {0.7, 1.1, 1.0},
                                              {-0.5, 2.0, -0.5},
                                              {0.2, 0.3, 2.0},
                                              {0.9, 5.0, 0.37}}};
    const double a_s = std::min(p.amplitude, 0.05 / k0);
    const double t_s = p.omega_p > 0.0 ? 1.0 / p.omega_p : opts.t;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& pt = points[i];
      const Direction dir{std::acos(pt.cos_theta), pt.phi};
      const double k = (p.omega0 + pt.delta_over_wp * p.omega_p) / p.c;
      auto residual = [&](double a) {
        PhysicalParams q = random;
        q.amplitude = a;
        return exact_mode_probability(q, dir, k, t_s, 1e-13) -
               expanded_mode_probability(q, dir, k, t_s);
      };
      double ratio = 8.0;
      if (a_s > 0.0 && p.omega_p > 0.0) {
        const double r1 = residual(a_s);
        const double r2 = residual(0.5 * a_s);
        ratio = r2 != 0.0 ? r1 / r2 : (r1 == 0.0 ? 8.0 : INFINITY);
      }
      push("scaling/mode_expansion_halving/point" + std::to_string(i), 8.0, ratio, 0.5, 0);
    }
  }

  // 4. Zeroth-order normalization: int p_static = B0(U0) t.
  const double t = opts.t;
  {
    const double integral =
        integrate_over_detuning([&](double d) { return spectrum_static(p, d, t); }, t);
    const double expected = bracket(BracketKind::B0_random, 2.0 * k0 * p.z0) * t;
    push("normalization/static_spectrum", expected, integral, 2e-3, 0);
  }

  // 5. First-order Parseval identity. The window truncation error of the h1
  //    tail scales with cos(omega_p t / 2), so the check runs at the nearest
  //    half-period time where it vanishes.
  {
    double expected = 0.0;
    double integral = 0.0;
    if (p.omega_p > 0.0 && p.amplitude > 0.0) {
      const double period = 2.0 * kPi / p.omega_p;
      const double tp = (std::floor(t / period) + 0.5) * period;
      const double b1 = bracket(BracketKind::B1_random_firstorder, 2.0 * k0 * p.z0);
      expected = (p.amplitude / p.z0) * b1 * (1.0 - std::cos(p.omega_p * tp)) / p.omega_p;
      // The window also has to reach past the sidebands at +-omega_p.
      const double window = 400.0 + 2.0 * p.omega_p * tp / kPi;
      integral = integrate_over_detuning(
          [&](double d) { return spectrum_dynamic_terms(p, d, tp).h1_term; }, tp, window);
    }
    push("normalization/first_order_parseval", expected, integral, 1e-2, 0);
  }

  // 6. Spectrum assembled from exact amplitudes against the closed form.
  {
    const double ak0 = p.amplitude * k0;
    const double scale = t * t / (2.0 * kPi);
    double plus = 0.0;
    double minus = 0.0;
    for (double d : {0.0, p.omega_p, -p.omega_p}) {
      const double closed = spectrum_static(p, d, t) + spectrum_dynamic(p, d, t);
      const double quad = spectrum_by_quadrature(p, d, t, opts.angular_nodes, 1e-11, opts.workers);
      const double bound = ak0 * ak0 * ak0 * scale;
      const double tol = std::max(1e-6, bound / std::abs(closed));
      push("spectrum/quadrature_vs_closed_form/delta=" + format_number(d), closed, quad, tol,
           opts.angular_nodes);
      if (d > 0.0) plus = quad;
      if (d < 0.0) minus = quad;
    }
    if (p.omega_p > 0.0) {
      push("spectrum/quadrature_parity", plus, minus, 1e-9, opts.angular_nodes);
    }
  }
  return reports;
}

}  // namespace oscmirror::oracle
