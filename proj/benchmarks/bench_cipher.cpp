#include <random>

#include <benchmark/benchmark.h>

#include "vpsc/baselines.hpp"
#include "vpsc/cipher.hpp"

namespace {

const std::vector<std::uint8_t> kSeed{9, 8, 7, 6, 5, 4, 3, 2};

vpsc::SignalFrame frame(std::size_t n) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return vpsc::SignalFrame(std::move(x));
}

void BM_VpscRoundTrip(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  vpsc::CipherConfig cfg;
  cfg.n = n;
  cfg.phi = static_cast<double>(n) + 1.0;
  cfg.lambda = 0.5;
  cfg.mode = vpsc::MitigationMode::combined;
  const auto sync = vpsc::SyncConfig::for_frames(kSeed, n, 64000.0);
  const auto key = vpsc::key_frame(sync, 0, n, cfg.phi_effective());
  const auto s = frame(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vpsc::decrypt_frame(vpsc::encrypt_frame(s, key, cfg), key, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VpscRoundTrip)->Arg(256)->Arg(1024);

void BM_FcsRoundTrip(benchmark::State& state) {
  const auto sync = vpsc::SyncConfig::for_frames(kSeed, 256, 64000.0);
  const auto key = vpsc::fcs_key(sync, 0, 256);
  const auto s = frame(256);
  for (auto _ : state) benchmark::DoNotOptimize(vpsc::fcs_decrypt(vpsc::fcs_encrypt(s, key), key));
}
BENCHMARK(BM_FcsRoundTrip);

void BM_RsaRoundTrip(benchmark::State& state) {
  const auto key = vpsc::make_rsa_key(kSeed, vpsc::Quantizer{});
  const auto s = frame(256);
  for (auto _ : state) benchmark::DoNotOptimize(vpsc::rsa_decrypt(vpsc::rsa_encrypt(s, key), key));
}
BENCHMARK(BM_RsaRoundTrip);

}  // namespace
