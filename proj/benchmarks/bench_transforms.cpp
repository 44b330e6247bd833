#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "spinneedlets/regression.hpp"

using namespace spinneedlets;

namespace {

HarmonicCoefficients random_section(int spin, int band_limit) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  HarmonicCoefficients a(spin, band_limit);
  for (int l = spin + 1; l <= band_limit; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double re = gauss(rng);
      a(l, m) = Complex(re, gauss(rng));
    }
  }
  return a;
}

void BM_SpinHarmonic(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const Direction x{1.1, 0.4};
  for (auto _ : state) {
    for (int m = -l; m <= l; ++m) benchmark::DoNotOptimize(spin_ylm({l, m, 2}, x));
  }
  state.SetItemsProcessed(state.iterations() * (2 * l + 1));
}
BENCHMARK(BM_SpinHarmonic)->Arg(8)->Arg(32)->Arg(128);

void BM_Analyze(benchmark::State& state) {
  const int j_max = static_cast<int>(state.range(0));
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::mixed, j_max);
  const HarmonicCoefficients a = random_section(2, frame.tight_band_limit());
  for (auto _ : state) benchmark::DoNotOptimize(analyze(frame, a));
}
BENCHMARK(BM_Analyze)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_Synthesize(benchmark::State& state) {
  const int j_max = static_cast<int>(state.range(0));
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::mixed, j_max);
  const NeedletCoefficients beta = analyze(frame, random_section(2, frame.tight_band_limit()));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_harmonics(frame, beta));
}
BENCHMARK(BM_Synthesize)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_EmpiricalHarmonics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::mixed, 5);
  const BesovTestSection truth = sample_besov_section(frame, {2.0, 2.0, 2.0, 5.0}, 15, 3);
  const Dataset data = simulate_dataset(truth, n, {NoiseKind::gaussian, 0.5}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_harmonics(data, 31));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EmpiricalHarmonics)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
