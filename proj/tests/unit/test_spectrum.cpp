#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oscmirror/rate.hpp"
#include "oscmirror/spectrum.hpp"

using namespace oscmirror;
using std::numbers::pi;

namespace {

PhysicalParams baseline() {
  PhysicalParams p;
  p.omega0 = 1e15;
  p.omega_p = 1.5e8;
  p.amplitude = 2e-7;
  p.z0 = 1e-6;
  return p;
}

double b0_static(const PhysicalParams& p) {
  return bracket(BracketKind::B0_random, 2.0 * p.omega0 / p.c * p.z0);
}

}  // namespace

TEST_CASE("sinc kernel") {
  const double t = 1e-6;
  CHECK(sinc_kernel(0.0, t) == t);
  CHECK(std::abs(sinc_kernel(2 * pi / t, t)) < 1e-15 * t);
  CHECK(sinc_kernel(1e-3, t) == doctest::Approx(t).epsilon(1e-12));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(-1e9, 1e9);
  for (int i = 0; i < 1000; ++i) {
    const double v = x(rng);
    CHECK(sinc_kernel(v, t) == sinc_kernel(-v, t));
  }
  // Continuity across the series switch.
  const double edge = 2e-4 / t;
  CHECK(sinc_kernel(edge * 0.999999, t) == doctest::Approx(sinc_kernel(edge * 1.000001, t)).epsilon(1e-9));
}

TEST_CASE("h kernels") {
  const double wp = 1.5e8;
  const double t = 3.3e-8;
  const double s = std::sin(0.5 * wp * t);
  CHECK(h_kernel(HKernel::h1, 0.0, wp, t) == doctest::Approx(4.0 * t / wp * s * s).epsilon(1e-12));

  const double T = 2 * pi / wp;
  for (double d : {0.0, 1e7, -4e8, 1.5e8}) {
    CHECK(std::abs(h_kernel(HKernel::h1, d, wp, T)) < 1e-12 * T * T);
  }

  const double h2 = t * t + std::pow(std::sin(wp * t) / wp, 2) -
                    2.0 * t * std::sin(wp * t) * std::cos(wp * t) / wp;
  CHECK(h_kernel(HKernel::h2, wp, wp, t) == doctest::Approx(h2).epsilon(1e-10));
  CHECK(h_kernel(HKernel::h2, wp * (1 + 1e-8), wp, t) == doctest::Approx(h2).epsilon(1e-7));
  CHECK(h_kernel(HKernel::h2, wp * (1 - 1e-8), wp, t) == doctest::Approx(h2).epsilon(1e-7));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-6e8, 6e8);
  std::uniform_real_distribution<double> tt(1e-9, 1e-5);
  for (int i = 0; i < 2000; ++i) CHECK(h_kernel(HKernel::h2, d(rng), wp, tt(rng)) >= 0.0);
}

TEST_CASE("static spectrum") {
  const PhysicalParams p = baseline();
  const double t = 1e-6;
  CHECK(spectrum_static(p, 0.0, t) == doctest::Approx(t * t / (2 * pi) * b0_static(p)).epsilon(1e-14));
  CHECK(std::abs(spectrum_static(p, 2 * pi / t, t)) < 1e-28 * t * t);
}

TEST_CASE("dynamic spectrum") {
  PhysicalParams still = baseline();
  still.amplitude = 0.0;
  CHECK(spectrum_dynamic(still, 0.0, 1e-6) == 0.0);
  CHECK(spectrum_dynamic(still, 1.5e8, 1e-6) == 0.0);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    PhysicalParams p;
    p.omega0 = 1e14 * std::pow(100.0, u(rng));
    p.omega_p = 1e7 * std::pow(1000.0, u(rng));
    p.z0 = 1e-7 * std::pow(100.0, u(rng));
    p.amplitude = 0.3 * u(rng) * p.z0;
    const double t = (0.1 + 50.0 * u(rng)) * 2 * pi / p.omega_p;
    const double d = (u(rng) - 0.5) * 8.0 * p.omega_p;
    const double plus = spectrum_static(p, d, t) + spectrum_dynamic(p, d, t);
    const double minus = spectrum_static(p, -d, t) + spectrum_dynamic(p, -d, t);
    CHECK(std::abs(plus - minus) <= 1e-12 * std::abs(plus));
  }
}

TEST_CASE("per-mode expansion reduces to the static probability") {
  const MirrorTrajectory still{1e-6, 0.0, 1.5e8};
  for (ModeKind k : {ModeKind::parallel_x, ModeKind::perpendicular_z}) {
    const double kz = 1.7e6;
    const double f0 = mode_scalar(k, kz, 1e-6);
    const double s = sinc_kernel(2e7, 1e-6);
    CHECK(mode_probability_second_order(k, kz, still, 2e7, 1e-6) == doctest::Approx(f0 * f0 * s * s));
  }
}

TEST_CASE("spectrum series") {
  const PhysicalParams p = baseline();
  const double t = 1e-6;
  const SpectrumSeries s = spectrum_series(p, {-4 * p.omega_p, 4 * p.omega_p, 8001}, t, 2);
  REQUIRE(s.size() == 8001);
  CHECK(s.detunings[4000] == 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double a = s.p_total[i];
    const double b = s.p_total[s.size() - 1 - i];
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
    CHECK(s.p_total[i] == s.p_static[i] + s.p_dynamic[i]);
  }
  // Central height, frozen from the first verified run.
  CHECK(s.p_total[4000] == doctest::Approx(1.3616267156602441e-13).epsilon(1e-12));
  CHECK(s.p_total[4000] ==
        doctest::Approx(spectrum_static(p, 0.0, t) + spectrum_dynamic(p, 0.0, t)).epsilon(1e-15));

  PhysicalParams still = p;
  still.amplitude = 0.0;
  const SpectrumSeries z = spectrum_series(still, {-1e9, 1e9, 101}, t);
  for (double v : z.p_dynamic) CHECK(v == 0.0);

  const SpectrumSeries serial = spectrum_series(p, {-6e8, 6e8, 999}, t, 1);
  const SpectrumSeries threaded = spectrum_series(p, {-6e8, 6e8, 999}, t, 4);
  CHECK(serial.p_total == threaded.p_total);

  CHECK_THROWS_AS(spectrum_series(p, {1.0, -1.0, 10}, t), GridError);
  CHECK_THROWS_AS(spectrum_series(p, {-1.0, 1.0, 1}, t), GridError);
  CHECK_THROWS_AS(spectrum_series(p, {-1.0, 1.0, 10}, -1.0), GridError);
}

TEST_CASE("envelope") {
  const PhysicalParams p = baseline();
  const double t = 1e-6;
  const SpectrumSeries s = spectrum_series(p, {-4 * p.omega_p, 4 * p.omega_p, 8001}, t);
  const SpectrumSeries e = envelope(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(e.p_total[i] >= s.p_total[i]);
    CHECK(e.p_dynamic[i] == e.p_total[i] - e.p_static[i]);
  }

  PhysicalParams still = p;
  still.amplitude = 0.0;
  const SpectrumSeries z = envelope(spectrum_series(still, {-4 * p.omega_p, 4 * p.omega_p, 8001}, t));
  const std::size_t mid = 4000;
  for (std::size_t i = mid; i + 1 < z.size(); ++i) {
    if (z.detunings[i] < 4 * pi / t) continue;
    CHECK(z.p_total[i + 1] <= z.p_total[i]);
  }

  CHECK_THROWS_AS(envelope(spectrum_series(p, {-1e6, 1e6, 100}, t)), GridError);
  SpectrumSeries tiny = s;
  tiny.detunings.resize(1);
  tiny.p_total.resize(1);
  CHECK_THROWS_AS(envelope(tiny), GridError);
}

TEST_CASE("peaks at baseline parameters") {
  const PhysicalParams p = baseline();
  const double t = 1e-6;
  const PeakReport r = find_peaks(envelope(spectrum_series(p, {-4 * p.omega_p, 4 * p.omega_p, 8001}, t)));
  const Peak* c = r.find(PeakClass::central);
  const Peak* plus = r.find(PeakClass::plus_wp);
  const Peak* minus = r.find(PeakClass::minus_wp);
  REQUIRE(c != nullptr);
  REQUIRE(plus != nullptr);
  REQUIRE(minus != nullptr);
  CHECK(std::abs(c->offset) <= 2 * pi / t);
  CHECK(std::abs(plus->offset - p.omega_p) <= 2 * pi / t);
  CHECK(std::abs(minus->offset + p.omega_p) <= 2 * pi / t);
  REQUIRE(r.ratio_wp.has_value());
  CHECK(std::abs(*r.ratio_wp - 1.0) <= 1e-9);
  CHECK(plus->fwhm > 0.0);
  for (std::size_t i = 1; i < r.peaks.size(); ++i) CHECK(r.peaks[i].offset > r.peaks[i - 1].offset);
}

TEST_CASE("no lateral peaks before one mirror period") {
  const PhysicalParams p = baseline();
  const double t = 0.2 * 2 * pi / p.omega_p;
  const PeakReport r = find_peaks(envelope(spectrum_series(p, {-20 * p.omega_p, 20 * p.omega_p, 8001}, t)));
  CHECK(r.find(PeakClass::central) != nullptr);
  CHECK(r.find(PeakClass::plus_wp) == nullptr);
  CHECK(r.find(PeakClass::minus_wp) == nullptr);
}

TEST_CASE("fast mirror envelope after fifty periods") {
  PhysicalParams p = baseline();
  p.omega_p = 1.5e9;
  const double t = 50 * 2 * pi / p.omega_p;
  const PeakReport r = find_peaks(envelope(spectrum_series(p, {-4 * p.omega_p, 4 * p.omega_p, 8001}, t)));
  CHECK(r.find(PeakClass::central) != nullptr);
  CHECK(r.find(PeakClass::plus_wp) != nullptr);
  CHECK(r.find(PeakClass::minus_wp) != nullptr);
}

TEST_CASE("peak finder edge cases") {
  SpectrumSeries flat;
  flat.t = 1e-6;
  flat.detunings = {-2.0, -1.0, 0.0, 1.0, 2.0};
  flat.p_total = {1.0, 1.0, 1.0, 1.0, 1.0};
  CHECK(find_peaks(flat).peaks.empty());

  SpectrumSeries plateau = flat;
  plateau.p_total = {0.0, 1.0, 1.0, 0.5, 0.0};
  const PeakReport pr = find_peaks(plateau);
  REQUIRE(pr.peaks.size() == 1);
  CHECK(pr.peaks[0].offset == -0.5);
  CHECK(pr.peaks[0].cls == PeakClass::central);

  SpectrumSeries negative = flat;
  negative.p_total = {-1.0, -0.5, -0.2, -0.5, -1.0};
  CHECK(find_peaks(negative).peaks.empty());

  SpectrumSeries empty;
  CHECK_THROWS_AS(find_peaks(empty), GridError);
}

TEST_CASE("surface") {
  const PhysicalParams p = baseline();
  const UniformGrid grid{-6e8, 6e8, 201};
  const std::vector<double> times = {1e-7, 5e-7, 1e-6};
  const auto rows = spectrum_surface(p, grid, times, 3);
  REQUIRE(rows.size() == 603);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const SpectrumSeries s = spectrum_series(p, grid, times[k]);
    for (std::size_t i = 0; i < grid.n; ++i) {
      const auto& r = rows[k * grid.n + i];
      CHECK(r.t == times[k]);
      CHECK(r.delta == s.detunings[i]);
      CHECK(r.p_total == s.p_total[i]);
    }
  }
  PhysicalParams still = p;
  still.amplitude = 0.0;
  const auto z = spectrum_surface(still, grid, times);
  for (const auto& r : z) {
    const double s = sinc_kernel(r.delta, r.t);
    CHECK(r.p_total == doctest::Approx(s * s * b0_static(p) / (2 * pi)).epsilon(1e-13));
  }
  const std::vector<double> bad = {1e-6, 1e-7};
  CHECK_THROWS_AS(spectrum_surface(p, grid, bad), GridError);
  const std::vector<double> none;
  CHECK_THROWS_AS(spectrum_surface(p, grid, none), GridError);
}

TEST_CASE("lateral prominence grows with time for the fast mirror") {
  PhysicalParams p = baseline();
  p.omega_p = 1.5e9;
  const double T = 2 * pi / p.omega_p;
  double previous = -1.0;
  for (int k = 0; k < 25; ++k) {
    const double t = (0.2 + (50.0 - 0.2) * k / 24.0) * T;
    const PeakReport r =
        find_peaks(envelope(spectrum_series(p, {-8 * p.omega_p, 8 * p.omega_p, 16001}, t)));
    const Peak* pk = r.find(PeakClass::plus_wp);
    const double prom = pk ? pk->prominence : 0.0;
    CAPTURE(k);
    CHECK(prom >= previous);
    previous = prom;
  }
  CHECK(previous > 0.0);
}
