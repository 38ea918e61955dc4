#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "vpsc/keystream.hpp"
#include "vpsc/spectral.hpp"

using namespace vpsc;

namespace {

const auto kGoldenSeed = parse_hex("000102030405060708090a0b0c0d0e0f");

}  // namespace

// Values computed independently with a reference AES-256-ECB over the same
// counter layout.
TEST_CASE("keystream matches reference AES-CTR values") {
  Keystream ks(kGoldenSeed, std::uint64_t{1} << 32);
  const auto v = ks.raw_values(0, 4);
  CHECK(v[0] == 0.27112410983891533);
  CHECK(v[1] == 0.8878585256226026);
  CHECK(v[2] == 0.5235612482926606);
  CHECK(v[3] == 0.5909267678030707);

  const auto w = ks.raw_values(1000, 3);
  CHECK(w[0] == 0.5402996973068278);
  CHECK(w[1] == 0.997196613451254);
  CHECK(w[2] == 0.5286012998402386);
}

TEST_CASE("keystream wraps at the counter period") {
  Keystream ks(kGoldenSeed, 16);
  const auto v = ks.raw_values(15, 4);
  CHECK(v[0] == 0.5712240507413623);
  CHECK(v[1] == 0.6265458351157481);
  CHECK(v[2] == 0.27112410983891533);
  CHECK(v[3] == 0.8878585256226026);
  CHECK_VPSC_ERROR(ks.raw_values(16, 1), ErrorKind::counter);
}

TEST_CASE("keystream values look uniform and independent") {
  Keystream ks(testing::seed_bytes(9), std::uint64_t{1} << 40);
  const auto v = ks.raw_values(12345, 100000);
  for (double x : v) {
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  CHECK(oracle::uniform_chi_square_pvalue(v, 100) > 1e-3);
  CHECK(oracle::runs_test_pvalue(v) > 1e-3);
  CHECK(oracle::ks_pvalue(v, [](double x) { return x; }) > 1e-3);
}

TEST_CASE("different seeds give unrelated streams") {
  Keystream a(testing::seed_bytes(1), 1u << 20), b(testing::seed_bytes(2), 1u << 20);
  const auto x = a.raw_values(0, 1000), y = b.raw_values(0, 1000);
  std::size_t equal = 0;
  for (std::size_t i = 0; i < x.size(); ++i) equal += x[i] == y[i];
  CHECK(equal == 0);
}

TEST_CASE("random access equals sequential generation") {
  auto cfg = SyncConfig::for_frames(testing::seed_bytes(4), 64, 64000.0, 0.0, 77);
  KeyFrameSequence seq(cfg, 64, 3.5);
  for (std::uint64_t f = 0; f < 200; ++f) {
    const auto a = seq.next();
    const auto b = key_frame(cfg, f, 64, 3.5);
    CHECK(a.frame_index == f);
    CHECK(a.k_m == b.k_m);
    CHECK(a.k_a == b.k_a);
  }
}

TEST_CASE("key frame structure") {
  const std::size_t n = 256;
  const double phi = 7.25;
  auto cfg = SyncConfig::for_frames(testing::seed_bytes(5), n, 64000.0);
  for (std::uint64_t f : {0u, 1u, 999u}) {
    const auto k = key_frame(cfg, f, n, phi);
    REQUIRE(k.size() == n);
    CHECK(k.k_m[0] == 0.0);
    CHECK(k.k_a[0] == 0.0);
    CHECK(k.k_a[n / 2] == 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      CHECK(k.k_m[i] >= 0.0);
      CHECK(k.k_m[i] < phi);
      CHECK(k.k_m[i] == k.k_m[n - i]);
      CHECK(k.k_a[i] >= -kPi);
      CHECK(k.k_a[i] < kPi);
    }
    for (std::size_t i = 1; i < n / 2; ++i) {
      // Antisymmetric on the circle.
      CHECK(std::abs(std::remainder(k.k_a[i] + k.k_a[n - i], kTwoPi)) < 1e-12);
    }
  }
}

TEST_CASE("key frame uses the raw values in order") {
  const std::size_t n = 8;
  const std::vector<double> raw{0.1, 0.2, 0.3, 0.4, 0.5, 0.25, 0.75, 0.9};
  const auto k = assemble_key_frame(raw, n, 10.0, 3);
  const std::vector<double> km{0.0, 1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) CHECK(k.k_m[i] == doctest::Approx(km[i]));
  // -pi + 2 pi * {0.25, 0.75, 0.9}
  CHECK(k.k_a[1] == doctest::Approx(-kPi / 2));
  CHECK(k.k_a[2] == doctest::Approx(kPi / 2));
  CHECK(k.k_a[3] == doctest::Approx(0.8 * kPi));
  CHECK(k.k_a[7] == doctest::Approx(kPi / 2));
  CHECK(k.k_a[5] == doctest::Approx(-0.8 * kPi));
  CHECK_VPSC_ERROR(assemble_key_frame(std::vector<double>(4, 0.5), n, 1.0, 0), ErrorKind::key);
}

TEST_CASE("frame counter arithmetic") {
  SyncConfig cfg;
  cfg.sc = 10;
  cfg.u = 128;
  cfg.period = 1000;
  CHECK(frame_counter(cfg, 0) == 10);
  CHECK(frame_counter(cfg, 1) == 138);
  CHECK(frame_counter(cfg, 8) == (10 + 8 * 128) % 1000);
  CHECK(counters_per_frame(256) == 128);
}

TEST_CASE("current and initial counters") {
  SyncConfig cfg;
  cfg.st = 1.0;
  cfg.g = 32000.0;
  cfg.u = 128;
  // elapsed 0.501 s -> 16032 ticks -> frame start 16000
  CHECK(current_counter(cfg, 1.5, 0.001) == 16032);
  CHECK(initial_counter(16032, 128) == 16000);
  CHECK(initial_counter(16000, 128) == 16000);
  CHECK(current_counter(cfg, 1.0, 0.0) == 0);
  cfg.period = 1000;
  CHECK(current_counter(cfg, 1.5, 0.001) == 32);
  CHECK_VPSC_ERROR(current_counter(cfg, 0.5, 0.0), ErrorKind::clock);
  CHECK_VPSC_ERROR(current_counter(cfg, 1.0, -0.01), ErrorKind::clock);
}

TEST_CASE("sync configuration validation") {
  SyncConfig cfg;
  cfg.period = 0;
  CHECK_VPSC_ERROR(cfg.validate(), ErrorKind::config);
  cfg = SyncConfig{};
  cfg.sc = cfg.period;
  CHECK_VPSC_ERROR(cfg.validate(), ErrorKind::config);
  cfg = SyncConfig{};
  cfg.g = 0.0;
  CHECK_VPSC_ERROR(cfg.validate(), ErrorKind::config);
  cfg = SyncConfig{};
  cfg.u = 1;
  CHECK_VPSC_ERROR(key_frame(cfg, 0, 256, 1.0), ErrorKind::config);
}

TEST_CASE("hex round trip") {
  const auto b = parse_hex("0xDEADbeef00");
  CHECK(b == std::vector<std::uint8_t>{0xde, 0xad, 0xbe, 0xef, 0x00});
  CHECK(to_hex(b) == "deadbeef00");
  CHECK_VPSC_ERROR(parse_hex("abc"), ErrorKind::config);
  CHECK_VPSC_ERROR(parse_hex("zz"), ErrorKind::config);
}
