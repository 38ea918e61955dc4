#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "vpsc/experiment.hpp"

using namespace vpsc;
namespace fs = std::filesystem;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.symbol_count = 300;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("spec parsing") {
  const auto s = parse_spec(R"({"ciphers":["none","vpsc"],"snr_db":[4,"inf"],"symbol_count":50,
                                "vpsc":{"mode":"pr"},"seeds":[7,8]})");
  CHECK(s.ciphers.size() == 2);
  CHECK(s.ciphers[1] == CipherKind::vpsc);
  CHECK(s.snr_db[0] == 4.0);
  CHECK(std::isinf(s.snr_db[1]));
  CHECK(s.symbol_count == 50);
  CHECK(s.vpsc.mode == MitigationMode::preemptive_rise);
  CHECK(s.seeds == std::vector<std::uint64_t>{7, 8});
  const auto again = parse_spec(spec_to_json(s));
  CHECK(spec_to_json(again) == spec_to_json(s));
}

TEST_CASE("bad specs are spec errors") {
  CHECK_VPSC_ERROR(parse_spec("{not json"), ErrorKind::spec);
  CHECK_VPSC_ERROR(parse_spec(R"({"ciphers":["enigma"]})"), ErrorKind::spec);
  CHECK_VPSC_ERROR(parse_spec(R"({"symbol_count":"many"})"), ErrorKind::spec);
  CHECK_VPSC_ERROR(parse_spec(R"({"vpsc":{"mode":"loud"}})"), ErrorKind::spec);
  auto s = small_spec();
  s.symbol_count = 0;
  CHECK_VPSC_ERROR(s.validate(), ErrorKind::spec);
  s = small_spec();
  s.snr_db.clear();
  CHECK_VPSC_ERROR(s.validate(), ErrorKind::spec);
  s = small_spec();
  s.modem.f_c = 40000.0;
  CHECK_VPSC_ERROR(s.validate(), ErrorKind::spec);
  s = small_spec();
  s.delay_scales = {1e6};
  CHECK_VPSC_ERROR(s.validate(), ErrorKind::spec);
  CHECK_VPSC_ERROR(load_spec("/nonexistent/spec.json"), ErrorKind::io);
}

TEST_CASE("noise convention") {
  ModemConfig m;
  CHECK(reference_power(m) == doctest::Approx(5.0));
  // sigma^2 = 5 N / (8 Eb/N0) at unit scale
  CHECK(noise_sigma(m, 10.0) == doctest::Approx(std::sqrt(5.0 * 256.0 / 80.0)));
  CHECK(noise_sigma(m, kInfiniteSnr) == 0.0);
  CHECK(max_symbol_magnitude(m) == doctest::Approx(128.0 * std::sqrt(18.0)));
}

TEST_CASE("noiseless links are error free for every cipher") {
  const auto spec = small_spec();
  for (auto c : {CipherKind::none, CipherKind::vpsc, CipherKind::fcs, CipherKind::alm, CipherKind::rsa}) {
    CAPTURE(to_string(c));
    const auto r = simulate_link(spec, c, kInfiniteSnr, 0.0, false, 1, 0);
    CHECK(r.bits_total == 4 * spec.symbol_count);
    CHECK(r.bit_errors == 0);
  }
}

TEST_CASE("every VPSC mode is error free without noise") {
  auto spec = small_spec();
  for (auto m : {MitigationMode::plain, MitigationMode::preemptive_rise, MitigationMode::statistical_floor,
                 MitigationMode::combined}) {
    spec.vpsc.mode = m;
    CHECK(simulate_link(spec, CipherKind::vpsc, kInfiniteSnr, 0.0, false, 2, 0).bit_errors == 0);
  }
}

TEST_CASE("VPSC at 14 dB stays close to the unencrypted link") {
  ExperimentSpec spec;  // 10000 symbols
  const auto none = simulate_link(spec, CipherKind::none, 14.0, 0.0, false, 1, 0);
  const auto vp = simulate_link(spec, CipherKind::vpsc, 14.0, 0.0, false, 1, 0);
  CHECK(none.ber() < 1e-3);
  CHECK(vp.ber() < 1e-3);
  const double floor = 1.0 / static_cast<double>(none.bits_total);
  CHECK(vp.ber() <= 10.0 * std::max(none.ber(), floor));
}

TEST_CASE("runs are deterministic") {
  const auto spec = small_spec();
  std::vector<ConstellationPoint> a, b;
  const auto r1 = simulate_link(spec, CipherKind::vpsc, 8.0, 0.0, false, 5, 2, &a);
  const auto r2 = simulate_link(spec, CipherKind::vpsc, 8.0, 0.0, false, 5, 2, &b);
  CHECK(r1.bit_errors == r2.bit_errors);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].i == b[i].i);
    CHECK(a[i].q == b[i].q);
  }
  CHECK(a.size() <= spec.constellation_points);
}

TEST_CASE("CSV and manifest output") {
  auto spec = small_spec();
  spec.ciphers = {CipherKind::none};
  spec.snr_db = {8.0, kInfiniteSnr};
  const auto dir = fs::temp_directory_path() / "vpsc_experiment_out";
  fs::create_directories(dir);
  const auto report = run_ber_experiment(spec);
  REQUIRE(report.records.size() == 2);
  write_ber_csv(dir / "ber.csv", report.records);
  write_manifest(dir / "manifest.json", spec, "ber", {"ber.csv"});
  const auto csv = slurp(dir / "ber.csv");
  CHECK(csv.rfind("cipher,snr_db,delay_scale,multipath,bit_errors,bits_total,ber\n", 0) == 0);
  CHECK(csv.find("none,inf,1,0,0,1200,0\n") != std::string::npos);
  const auto manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("\"experiment\"") != std::string::npos);
  CHECK(manifest.find(std::string(library_version())) != std::string::npos);
  fs::remove_all(dir);
  CHECK_VPSC_ERROR(write_ber_csv("/nonexistent-dir/ber.csv", report.records), ErrorKind::io);
}

TEST_CASE("number formatting") {
  CHECK(format_number(kInfiniteSnr) == "inf");
  CHECK(format_number(-kInfiniteSnr) == "-inf");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(12.0) == "12");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("key material layout") {
  ExperimentSpec spec;
  spec.secret_seed = "abcd";
  const auto k = key_material(spec, 0x0102, 3);
  REQUIRE(k.size() == 18);
  CHECK(k[0] == 0xab);
  CHECK(k[1] == 0xcd);
  CHECK(k[2] == 0x02);
  CHECK(k[3] == 0x01);
  CHECK(k[10] == 3);
}

TEST_CASE("cipher names") {
  for (auto c : {CipherKind::none, CipherKind::vpsc, CipherKind::fcs, CipherKind::alm, CipherKind::rsa}) {
    CHECK(parse_cipher_kind(to_string(c)) == c);
  }
  CHECK_VPSC_ERROR(parse_cipher_kind("enigma"), ErrorKind::spec);
}
