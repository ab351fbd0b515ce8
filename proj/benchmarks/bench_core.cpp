#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "nvmag/lockin.hpp"
#include "nvmag/mainsfilter.hpp"
#include "nvmag/spectral.hpp"
#include "nvmag/synth.hpp"

using namespace nvmag;

namespace {

constexpr double kRate = 25000.0;

NoiseEnvironment mains_env() {
  NoiseEnvironment env;
  env.harmonic_amplitudes = {{1, 3e-7}, {3, 3e-7}, {5, 3e-7}};
  env.phase_walk_sigma = 0.1;
  env.white_floor = 150e-12;
  env.rng_seed = 7;
  return env;
}

void BM_FiltfiltNotch(benchmark::State& state) {
  const double duration = static_cast<double>(state.range(0));
  const Timeseries x = gen_environment(mains_env(), kRate, duration);
  const FilterParams p{50.0, 1.0, 2};
  for (auto _ : state) benchmark::DoNotOptimize(zero_phase_filter(x, FilterKind::notch, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_FiltfiltNotch)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_FiltfiltHighpass(benchmark::State& state) {
  const Timeseries x = gen_environment(mains_env(), kRate, 60.0);
  const FilterParams p{10.0, 1.0, 2};
  for (auto _ : state) benchmark::DoNotOptimize(zero_phase_filter(x, FilterKind::highpass, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_FiltfiltHighpass)->Unit(benchmark::kMillisecond);

void BM_CoherentSubtract(benchmark::State& state) {
  const NoiseEnvironment env = mains_env();
  const Timeseries x = gen_environment(env, kRate, 60.0);
  const PhaseSeries phase = estimate_phase_drift(gen_mains_reference(env, kRate, 60.0), 50.0, 1.0);
  const int passes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(coherent_subtract(x, phase, 50.0, passes));
}
BENCHMARK(BM_CoherentSubtract)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
  const NoiseEnvironment env = mains_env();
  const Timeseries x = gen_environment(env, kRate, 60.0);
  const Timeseries ref = gen_mains_reference(env, kRate, 60.0);
  const FilterChainConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(x, ref, cfg));
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_Asd(benchmark::State& state) {
  const Timeseries x = gen_environment(mains_env(), kRate, 60.0);
  const auto seg = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(asd(x, seg));
}
BENCHMARK(BM_Asd)->Arg(4096)->Arg(25000)->Unit(benchmark::kMillisecond);

void BM_SweepDemod(benchmark::State& state) {
  OdmrModel m;
  FmDriveConfig drive;
  drive.three_tone_enabled = state.range(1) != 0;
  const auto points = static_cast<std::size_t>(state.range(0));
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = m.resonance_center() - 5e6 + 10e6 * static_cast<double>(i) / static_cast<double>(points - 1);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_demod(m, drive, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(points));
}
BENCHMARK(BM_SweepDemod)->Args({2001, 0})->Args({2001, 1})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
