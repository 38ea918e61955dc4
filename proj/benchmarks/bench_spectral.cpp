#include <random>

#include <benchmark/benchmark.h>

#include "vpsc/spectral.hpp"

namespace {

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

void BM_Analyze(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vpsc::analyze(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Analyze)->RangeMultiplier(4)->Range(64, 4096);

void BM_Synthesize(benchmark::State& state) {
  const auto s = vpsc::analyze(noise(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(vpsc::synthesize(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Synthesize)->RangeMultiplier(4)->Range(64, 4096);

void BM_Autocorrelation(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vpsc::autocorrelation(x));
}
BENCHMARK(BM_Autocorrelation)->Arg(256)->Arg(2048);

}  // namespace
