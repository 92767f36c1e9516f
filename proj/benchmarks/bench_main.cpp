#include <benchmark/benchmark.h>

#include "oscmirror/oracle.hpp"
#include "oscmirror/rate.hpp"
#include "oscmirror/spectrum.hpp"

using namespace oscmirror;

namespace {

PhysicalParams baseline() {
  PhysicalParams p;
  p.omega0 = 1e15;
  p.omega_p = 1.5e8;
  p.amplitude = 2e-7;
  p.z0 = 1e-6;
  return p;
}

void BM_Bracket(benchmark::State& state) {
  const auto kind = static_cast<BracketKind>(state.range(0));
  double U = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bracket(kind, U));
    U = U < 50.0 ? U * 1.001 : 0.1;
  }
}
BENCHMARK(BM_Bracket)->DenseRange(0, 5);

void BM_SpectrumSeries(benchmark::State& state) {
  const PhysicalParams p = baseline();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto s = spectrum_series(p, {-4 * p.omega_p, 4 * p.omega_p, n}, 1e-6, 1);
    benchmark::DoNotOptimize(s.p_total.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SpectrumSeries)->Arg(1001)->Arg(8001)->Arg(64001);

void BM_EnvelopePeaks(benchmark::State& state) {
  const PhysicalParams p = baseline();
  const auto s = spectrum_series(p, {-4 * p.omega_p, 4 * p.omega_p, 8001}, 1e-6, 1);
  for (auto _ : state) {
    auto r = find_peaks(envelope(s));
    benchmark::DoNotOptimize(r.peaks.data());
  }
}
BENCHMARK(BM_EnvelopePeaks);

void BM_OracleSpectrumPoint(benchmark::State& state) {
  const PhysicalParams p = baseline();
  const auto nodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::spectrum_by_quadrature(p, p.omega_p, 1e-6, nodes));
  }
}
BENCHMARK(BM_OracleSpectrumPoint)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_AngularBracket(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::angular_bracket_quadrature(BracketKind::B2_spectrum, 10.0));
  }
}
BENCHMARK(BM_AngularBracket)->Unit(benchmark::kMicrosecond);

void BM_DecayProbability(benchmark::State& state) {
  const PhysicalParams p = baseline();
  const double t = static_cast<double>(state.range(0)) * 1e-8;
  for (auto _ : state) benchmark::DoNotOptimize(decay_probability(p, t));
}
BENCHMARK(BM_DecayProbability)->Arg(1)->Arg(100)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
