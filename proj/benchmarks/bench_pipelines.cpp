#include <benchmark/benchmark.h>

#include <algorithm>

#include "subnyq/experiment.hpp"
#include "subnyq/fri_recovery.hpp"
#include "subnyq/rng.hpp"
#include "subnyq/samplers.hpp"
#include "subnyq/sparse_recovery.hpp"
#include "subnyq/spectral_recovery.hpp"

using namespace subnyq;

namespace {

// Desk-scale converter: m = 35, M = 195, f_p = f_s = 51 kHz, T = 61.
struct Desk {
  MwcConfig cfg;
  double grid_rate = 0.0;
  double duration = 0.0;
  MultibandSpec spec;

  Desk()
  {
    cfg.channels = 35;
    cfg.chips_per_period = 195;
    cfg.aliasing_rate = cfg.channel_rate = 51e3;
    cfg.sign_patterns = random_sign_patterns(35, 195, 1);
    grid_rate = 10.0 * 195 * 51e3;
    duration = 61 / 51e3;
    spec.band_count = 6;
    spec.band_width = 50e3;
    spec.f_max = 97 * 51e3;
    for (long q : {600L, 2400L, 5000L}) spec.carriers.push_back(q / duration);
  }
};

void BM_MwcSample(benchmark::State& state)
{
  const Desk d;
  const MwcSimulator sim(d.cfg, d.grid_rate, d.duration);
  const DenseSignal x = gen_multiband(d.spec, d.grid_rate, d.duration, 5);
  for (auto _ : state) benchmark::DoNotOptimize(sim.sample(x));
}
BENCHMARK(BM_MwcSample)->Unit(benchmark::kMillisecond);

void BM_Ctf(benchmark::State& state)
{
  const Desk d;
  const CMatrix c = mwc_matrix(d.cfg);
  const CMatrix y = mwc_sample(gen_multiband(d.spec, d.grid_rate, d.duration, 5), d.cfg);
  CtfOptions opts;
  opts.real_input = true;
  opts.residual_tol = 1e-8;
  for (auto _ : state) benchmark::DoNotOptimize(ctf(y, c, 12, opts));
}
BENCHMARK(BM_Ctf)->Unit(benchmark::kMillisecond);

void BM_Omp(benchmark::State& state)
{
  const int k = static_cast<int>(state.range(0));
  RdConfig cfg;
  cfg.tone_grid_size = 512;
  cfg.rate = 128;
  cfg.chips = random_chips(512, 3);
  const auto m = rd_sample(random_harmonic(512, k, 4), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(omp(m.y, m.sensing, k));
}
BENCHMARK(BM_Omp)->Arg(5)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_FriRecover(benchmark::State& state)
{
  const int l = static_cast<int>(state.range(0));
  FriSpec spec;
  Rng rng(11);
  for (int i = 0; i < l; ++i) spec.delays.push_back((i + rng.uniform(0.2, 0.8)) / l);
  for (int i = 0; i < l; ++i) spec.amplitudes.emplace_back(rng.uniform(0.5, 1.5), 0.0);
  const SosKernel kernel = SosKernel::dirichlet(l, 1.0);
  const ComplexSeq c = kernel_sample(gen_fri_periodic(spec, 4.0 * (2 * l + 1) + 2, 1), kernel);
  for (auto _ : state) benchmark::DoNotOptimize(fri_recover(c, kernel, l, PulseSpectrum::dirac()));
}
BENCHMARK(BM_FriRecover)->Arg(3)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_PnsTrial(benchmark::State& state)
{
  auto cfg = default_config(Scenario::pns);
  cfg.trials = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg));
}
BENCHMARK(BM_PnsTrial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
