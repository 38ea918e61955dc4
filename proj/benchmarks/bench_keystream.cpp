#include <benchmark/benchmark.h>

#include "vpsc/keystream.hpp"

namespace {

const std::vector<std::uint8_t> kSeed{1, 2, 3, 4, 5, 6, 7, 8};

void BM_RawValues(benchmark::State& state) {
  vpsc::Keystream ks(kSeed, std::uint64_t{1} << 32);
  const auto count = static_cast<std::size_t>(state.range(0));
  std::uint64_t counter = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ks.raw_values(counter, count));
    counter = (counter + count) % ks.period();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RawValues)->Arg(256)->Arg(4096);

void BM_KeyFrameRandomAccess(benchmark::State& state) {
  const auto cfg = vpsc::SyncConfig::for_frames(kSeed, 256, 64000.0);
  std::uint64_t f = 0;
  for (auto _ : state) benchmark::DoNotOptimize(vpsc::key_frame(cfg, f++, 256, 10.0));
}
BENCHMARK(BM_KeyFrameRandomAccess);

void BM_KeyFrameSequential(benchmark::State& state) {
  const auto cfg = vpsc::SyncConfig::for_frames(kSeed, 256, 64000.0);
  vpsc::KeyFrameSequence seq(cfg, 256, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(seq.next());
}
BENCHMARK(BM_KeyFrameSequential);

}  // namespace
