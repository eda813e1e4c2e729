#include "nvrf/analysis.hpp"
#include "nvrf/field_geometry.hpp"
#include "nvrf/pulse_compiler.hpp"
#include "nvrf/spin_dynamics.hpp"

#include <benchmark/benchmark.h>

using namespace nvrf;

namespace {

void BM_RenderXy8(benchmark::State &state)
{
  auto const seq = build_xy8(static_cast<int>(state.range(0)), 26e-9, 12.5e-9);
  for (auto _ : state) { benchmark::DoNotOptimize(render_waveform(seq)); }
}
BENCHMARK(BM_RenderXy8)->Arg(1)->Arg(16)->Arg(64);

void BM_PropagateBloch(benchmark::State &state)
{
  auto const seq = build_xy8(static_cast<int>(state.range(0)), 26e-9, 12.5e-9);
  auto const wf = render_waveform(seq);
  RFField const f{0.44e-6, 0.5 / 26e-9, 0.0, PhaseMode::fixed};
  NVParams const p;
  for (auto _ : state) { benchmark::DoNotOptimize(propagate_bloch(wf, 0.0, f, p)); }
}
BENCHMARK(BM_PropagateBloch)->Arg(1)->Arg(16);

void BM_ClosedFormPhase(benchmark::State &state)
{
  auto const seq = build_xy8(16, 26e-9, 12.5e-9);
  RFField const f{0.44e-6, 19.23e6, 0.0, PhaseMode::fixed};
  PhysConsts const c;
  for (auto _ : state) { benchmark::DoNotOptimize(phase_closed_form(seq, f, c)); }
}
BENCHMARK(BM_ClosedFormPhase);

void BM_FilterFunction(benchmark::State &state)
{
  auto const seq = build_xy8(16, 26e-9, 12.5e-9);
  for (auto _ : state) { benchmark::DoNotOptimize(filter_function(seq, 19.1e6)); }
}
BENCHMARK(BM_FilterFunction);

void BM_FieldMap(benchmark::State &state)
{
  int const n = static_cast<int>(state.range(0));
  Grid const grid{40e-6 / n, -20e-6, 0.0, n, n};
  WireGeometry const g;
  PhysConsts const c;
  for (auto _ : state) { benchmark::DoNotOptimize(build_field_map(grid, g, default_nv_axis(), c)); }
}
BENCHMARK(BM_FieldMap)->Arg(32)->Arg(256);

void BM_FitLorentzianPair(benchmark::State &state)
{
  NVParams const p;
  std::vector<double> f;
  for (int i = 0; i < 1501; ++i) { f.push_back(2.750e9 + i * 1e4); }
  SweepCurve const s{f, simulate_odmr(p, 4.0286e-3, f, 0.31e6, 0.34e6), {}};
  for (auto _ : state) { benchmark::DoNotOptimize(fit_lorentzian_pair(s)); }
}
BENCHMARK(BM_FitLorentzianPair);

void BM_FitDoubleExponential(benchmark::State &state)
{
  NVParams const p;
  std::vector<double> t;
  for (int i = 0; i < 150; ++i) { t.push_back(1e-6 + i * 2e-6); }
  SweepCurve const s{t, simulate_hahn_decay(p, t, 3.14159265358979), {}};
  for (auto _ : state) { benchmark::DoNotOptimize(fit_double_exponential(s)); }
}
BENCHMARK(BM_FitDoubleExponential);

} // namespace

BENCHMARK_MAIN();
