// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vpsc/baselines.hpp"
#include "vpsc/cipher.hpp"
#include "vpsc/errors.hpp"
#include "vpsc/experiment.hpp"
#include "vpsc/keystream.hpp"

using namespace vpsc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<std::uint8_t> seed_bytes(std::uint8_t tag) {
  std::vector<std::uint8_t> s(16);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::uint8_t>(tag * 31 + i);
  return s;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// 1: round trips for every mode and baseline over 1000 random frames.
Outcome round_trips() {
  const std::size_t n = 256, frames = 1000;
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto sync = SyncConfig::for_frames(seed_bytes(1), n, 64000.0);
  std::vector<std::vector<double>> plain(frames, std::vector<double>(n));
  for (auto& f : plain)
    for (auto& x : f) x = u(rng);

  std::ostringstream detail;
  bool ok = true;
  auto report = [&](const std::string& name, double err, double limit) {
    detail << name << "=" << fmt(err) << " ";
    ok = ok && err < limit;
  };

  for (auto mode : {MitigationMode::plain, MitigationMode::preemptive_rise, MitigationMode::statistical_floor,
                    MitigationMode::combined}) {
    CipherConfig cfg;
    cfg.n = n;
    cfg.lambda = 0.5;
    cfg.psi = 0.5;
    cfg.mode = mode;
    // |X[k]| <= N for samples in [-1, 1]; the floor needs headroom of psi.
    cfg.phi = static_cast<double>(n) + 1.0 + cfg.psi;
    double err = 0.0;
    for (std::size_t f = 0; f < frames; ++f) {
      const auto k = key_frame(sync, f, n, cfg.phi_effective());
      const SignalFrame s(plain[f]);
      const auto back = decrypt_frame(encrypt_frame(s, k, cfg), k, cfg);
      for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(back.samples[i] - s.samples[i]));
    }
    report(std::string(to_string(mode)), err, 1e-8);
  }

  double err = 0.0;
  for (std::size_t f = 0; f < frames; ++f) {
    const auto k = fcs_key(sync, f, n);
    const SignalFrame s(plain[f]);
    const auto back = fcs_decrypt(fcs_encrypt(s, k), k);
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(back.samples[i] - s.samples[i]));
  }
  report("fcs", err, 1e-8);

  err = 0.0;
  const AlmRange range{-1.0, 1.0};
  for (std::size_t f = 0; f < frames; ++f) {
    const auto k = alm_key(sync, f, n);
    const SignalFrame s(plain[f]);
    const auto back = alm_decrypt(alm_encrypt(s, k, range), k, range);
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(back.samples[i] - s.samples[i]));
  }
  report("alm", err, 1e-8);

  err = 0.0;
  const Quantizer q{-1.0, 1.0, 4096};
  const auto key = make_rsa_key(seed_bytes(2), q);
  for (std::size_t f = 0; f < frames; ++f) {
    const SignalFrame s(plain[f]);
    const auto back = rsa_decrypt(rsa_encrypt(s, key), key);
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(back.samples[i] - q.apply(s.samples[i])));
  }
  report("rsa(vs quantized)", err, 1e-12);
  return {ok, detail.str()};
}

SpectrumFrame one_bin(double m) {
  SpectrumFrame s;
  s.magnitudes.assign(8, 0.0);
  s.angles.assign(8, 0.0);
  s.magnitudes[1] = s.magnitudes[7] = m;
  return s;
}

KeyFrame one_bin_key(double km) {
  KeyFrame k;
  k.k_m.assign(8, 0.0);
  k.k_a.assign(8, 0.0);
  k.k_m[1] = k.k_m[7] = km;
  return k;
}

// 2: the noise anomaly and its removal by preemptive rise.
Outcome noise_anomaly() {
  CipherConfig plain;
  plain.n = 8;
  plain.phi = 10.0;
  plain.lambda = 0.5;
  plain.mode = MitigationMode::plain;
  auto c = encrypt(one_bin(9.9), one_bin_key(4.2), plain);
  c.magnitudes[1] += 0.3;
  c.magnitudes[7] += 0.3;
  const double wrapped = decrypt(c, one_bin_key(4.2), plain).magnitudes[1];

  CipherConfig pr = plain;
  pr.mode = MitigationMode::preemptive_rise;
  pr.psi = 1.0;
  c = encrypt(one_bin(9.9), one_bin_key(4.2), pr);
  c.magnitudes[1] += 0.3;
  c.magnitudes[7] += 0.3;
  const double pr_error = decrypt(c, one_bin_key(4.2), pr).magnitudes[1] - 9.9;

  const bool ok = std::abs(wrapped - 0.2) < 1e-9 && std::abs(pr_error - 0.3) < 1e-9;
  return {ok, "plain decrypts to " + fmt(wrapped) + " (expect 0.2), PR error " + fmt(pr_error) + " (expect 0.3)"};
}

// 3: no wrap events under bounded magnitude noise for PR and combined.
Outcome no_wraps() {
  const std::size_t n = 256, frames = 10000;
  const double phi = 100.0, b = 2.0;
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> mag(0.0, phi), ang(-kPi, kPi), noise(-b, b);
  auto sync = SyncConfig::for_frames(seed_bytes(3), n, 64000.0);

  std::ostringstream detail;
  bool ok = true;
  for (auto mode : {MitigationMode::preemptive_rise, MitigationMode::combined}) {
    CipherConfig cfg;
    cfg.n = n;
    cfg.phi = phi;
    cfg.mode = mode;
    cfg.psi = mode == MitigationMode::preemptive_rise ? b : 0.0;
    cfg.lambda = mode == MitigationMode::combined ? b : 0.0;
    std::size_t wraps = 0;
    double worst = 0.0, max_noise = 0.0;
    for (std::size_t f = 0; f < frames; ++f) {
      SpectrumFrame m;
      m.magnitudes.resize(n);
      m.angles.resize(n);
      for (std::size_t i = 0; i <= n / 2; ++i) {
        m.magnitudes[i] = mag(rng);
        m.angles[i] = (i == 0 || i == n / 2) ? 0.0 : ang(rng);
      }
      for (std::size_t i = 1; i < n / 2; ++i) {
        m.magnitudes[n - i] = m.magnitudes[i];
        m.angles[n - i] = wrap_angle(-m.angles[i]);
      }
      const auto k = key_frame(sync, f, n, cfg.phi_effective());
      auto c = encrypt(m, k, cfg);
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = noise(rng);
        c.magnitudes[i] += d[i];
      }
      const auto out = decrypt(c, k, cfg);
      for (std::size_t i = 0; i < n; ++i) {
        const double err = std::abs(out.bin(i) - m.bin(i));
        worst = std::max(worst, err);
        // A wrap throws the bin across the modulus; clamping an impossible
        // magnitude back into range can only shrink the error.
        if (err > std::abs(d[i]) + 1e-9 * phi) ++wraps;
        max_noise = std::max(max_noise, std::abs(d[i]));
      }
    }
    detail << to_string(mode) << ": " << wraps << " wraps, max error " << fmt(worst) << " vs max noise "
           << fmt(max_noise) << "; ";
    ok = ok && wraps == 0 && std::abs(worst - max_noise) <= 1e-6 * b;
  }
  return {ok, detail.str()};
}

// 4: BER vs SNR for the unencrypted link, VPSC and the weak baselines, as
// produced by the experiment runner.
Outcome ber_vs_snr() {
  ExperimentSpec spec;
  spec.symbol_count = 2000;
  spec.ciphers = {CipherKind::none, CipherKind::vpsc};
  spec.snr_db = {6, 8, 10, 12, 14, 16};
  const auto main_sweep = run_ber_experiment(spec).records;

  spec.ciphers = {CipherKind::alm, CipherKind::rsa};
  spec.snr_db = {6, 8, 10, 12, 14, 16, 20, 24, kInfiniteSnr};
  const auto weak_sweep = run_ber_experiment(spec).records;

  std::ostringstream detail;
  bool a = true, b = true, c = true, d = true;
  for (const auto& r : main_sweep) {
    if (r.cipher == CipherKind::none) {
      const double theory = qam16_ber_theory(std::pow(10.0, r.snr_db / 10.0));
      const double expected = theory * static_cast<double>(r.bits_total);
      bool ok;
      if (expected >= 10.0) {
        ok = r.ber() <= 1.5 * theory && r.ber() >= theory / 1.5;
      } else {
        // Too few expected errors for a ratio; require the count to be a
        // plausible Poisson draw instead.
        const auto [lo, hi] = oracle::poisson_interval(expected, 1e-3);
        ok = r.bit_errors >= lo && r.bit_errors <= hi;
      }
      a = a && ok;
      detail << "none@" << r.snr_db << "=" << fmt(r.ber()) << "/th " << fmt(theory) << (ok ? "" : "!") << " ";
    } else if (r.snr_db == 10.0 || r.snr_db == 14.0) {
      const bool ok = r.ber() <= (r.snr_db == 10.0 ? 1e-2 : 1e-3);
      b = b && ok;
      detail << "| vpsc@" << r.snr_db << "=" << fmt(r.ber()) << " ";
    }
  }

  std::map<CipherKind, std::pair<double, double>> lowest;
  for (const auto& r : weak_sweep) {
    if (std::isinf(r.snr_db)) {
      d = d && r.bit_errors == 0;
      continue;
    }
    auto& [ber, at] = lowest.try_emplace(r.cipher, 1.0, 0.0).first->second;
    if (r.ber() < ber) ber = r.ber(), at = r.snr_db;
    c = c && r.ber() > 0.2;
  }
  for (const auto& [kind, low] : lowest) {
    detail << "| " << to_string(kind) << " min=" << fmt(low.first) << "@" << low.second << "dB ";
  }
  detail << "| a=" << a << " b=" << b << " c=" << c << " d=" << d;
  return {a && b && c && d, detail.str()};
}

bool has_interior_peak(const std::vector<double>& y) {
  const auto it = std::max_element(y.begin(), y.end());
  const bool interior = it != y.begin() && it != y.end() - 1;
  const bool monotone_up = std::is_sorted(y.begin(), y.end());
  const bool monotone_down = std::is_sorted(y.rbegin(), y.rend());
  return interior && !monotone_up && !monotone_down;
}

// 5: BER vs multipath delay scale.
Outcome ber_vs_delay() {
  ExperimentSpec spec;
  spec.symbol_count = 2000;
  spec.seeds = {1, 2, 3, 4};
  spec.ciphers = {CipherKind::none, CipherKind::vpsc, CipherKind::fcs};
  const auto report = run_ber_delay_experiment(spec);
  std::map<CipherKind, std::vector<double>> curves;
  for (const auto& r : report.records) curves[r.cipher].push_back(r.ber());

  const auto& none = curves[CipherKind::none];
  const auto& vp = curves[CipherKind::vpsc];
  const auto& fcs = curves[CipherKind::fcs];
  const double none_peak = *std::max_element(none.begin(), none.end());
  const double vp_peak = *std::max_element(vp.begin(), vp.end());
  const double fcs_min = *std::min_element(fcs.begin(), fcs.end());
  const bool ok = spec.delay_scales.size() >= 8 && has_interior_peak(none) && has_interior_peak(vp) &&
                  vp_peak <= 3.0 * none_peak && fcs_min > 0.0;
  std::ostringstream detail;
  detail << spec.delay_scales.size() << " points; none peak " << fmt(none_peak) << ", vpsc peak " << fmt(vp_peak)
         << ", fcs min " << fmt(fcs_min) << ", interior peaks " << has_interior_peak(none) << "/"
         << has_interior_peak(vp);
  return {ok, detail.str()};
}

// 6: ciphertext autocorrelation.
Outcome ciphertext_autocorrelation() {
  ExperimentSpec spec;
  const auto traces = run_autocorrelation_analysis(spec);
  double vp_max = 0.0, fcs_min = 1e300;
  std::size_t vp_keys = 0, sine_keys = 0;
  bool period = true;
  const auto p = static_cast<std::size_t>(std::lround(spec.modem.f_s / spec.autocorr.sine_hz));
  for (const auto& t : traces) {
    if (t.cipher == CipherKind::vpsc) vp_max = std::max(vp_max, t.max_off_peak), ++vp_keys;
    if (t.cipher == CipherKind::fcs) fcs_min = std::min(fcs_min, t.max_off_peak);
    if (t.cipher == CipherKind::rsa && t.input == "sine") {
      ++sine_keys;
      // The sine's period survives: lag p is the strongest non-zero lag up to
      // 1.5 periods and stays close to R[0].
      std::size_t best = 1;
      for (std::size_t k = 1; k <= p + p / 2 && k < t.normalized.size(); ++k) {
        if (t.normalized[k] > t.normalized[best]) best = k;
      }
      period = period && best == p && t.normalized[p] > 0.5;
    }
  }
  const bool ok = vp_keys >= 3 && sine_keys >= 1 && vp_max < 0.1 && fcs_min >= 5.0 * vp_max && period;
  return {ok, "vpsc max " + fmt(vp_max) + " over " + std::to_string(vp_keys) + " keys, fcs min " + fmt(fcs_min) +
                  ", rsa sine period " + std::to_string(p) + (period ? " kept" : " lost")};
}

// 7: spectral occupancy.
Outcome spectral_occupancy() {
  ExperimentSpec spec;
  const auto reports = run_spectrum_report(spec);
  double vp = 1.0, alm = 0.0, rsa = 0.0;
  for (const auto& r : reports) {
    if (r.cipher == CipherKind::vpsc) vp = r.out_of_band_fraction;
    if (r.cipher == CipherKind::alm) alm = r.out_of_band_fraction;
    if (r.cipher == CipherKind::rsa) rsa = r.out_of_band_fraction;
  }
  return {vp < 0.01 && alm > 0.2 && rsa > 0.2,
          "out-of-band fraction vpsc " + fmt(vp) + ", alm " + fmt(alm) + ", rsa " + fmt(rsa)};
}

// 8: ciphertext magnitudes of a fixed plaintext are uniform over keys.
Outcome uniformity() {
  CipherConfig cfg;
  cfg.n = 8;
  cfg.phi = 10.0;
  cfg.lambda = 0.5;
  cfg.mode = MitigationMode::combined;
  auto sync = SyncConfig::for_frames(seed_bytes(8), 8, 64000.0);
  Keystream ks(sync.secret_seed, sync.period);
  std::vector<double> mags;
  const std::size_t keys = 100000;
  mags.reserve(keys);
  const auto m = one_bin(3.3);
  for (std::uint64_t f = 0; f < keys; ++f) {
    const auto c = encrypt(m, key_frame(sync, f, 8, cfg.phi_effective()), cfg);
    mags.push_back(c.magnitudes[1]);
  }
  const double lo = cfg.lambda, hi = cfg.phi_effective() + cfg.lambda;
  const double p = oracle::ks_pvalue(mags, [&](double x) { return std::clamp((x - lo) / (hi - lo), 0.0, 1.0); });
  return {p > 1e-3, "KS p = " + fmt(p) + " over " + std::to_string(keys) + " keys"};
}

// 9: sync recovery and wrong-seed rejection.
Outcome sync_trials() {
  ExperimentSpec spec;
  const auto records = run_sync_trials(spec);
  std::size_t right = 0, right_ok = 0, wrong = 0, rejected = 0;
  long worst_clean = 0, worst_noisy = 0;
  for (const auto& r : records) {
    if (r.wrong_seed) {
      ++wrong;
      rejected += !r.detected;
      continue;
    }
    ++right;
    const long e = std::abs(r.error);
    const bool clean = std::isinf(r.snr_db);
    (clean ? worst_clean : worst_noisy) = std::max(clean ? worst_clean : worst_noisy, e);
    right_ok += r.detected && e <= (clean ? 1 : 2);
  }
  const double rate = wrong == 0 ? 0.0 : static_cast<double>(rejected) / static_cast<double>(wrong);
  return {right_ok == right && wrong >= 100 && rate >= 0.95,
          std::to_string(right_ok) + "/" + std::to_string(right) + " delays recovered (worst error " +
              std::to_string(worst_clean) + " clean, " + std::to_string(worst_noisy) + " at 10 dB), " +
              std::to_string(rejected) + "/" + std::to_string(wrong) + " wrong seeds rejected"};
}

// 10: random access and the receiver clock.
Outcome keystream_access() {
  const std::size_t n = 256;
  auto cfg = SyncConfig::for_frames(seed_bytes(10), n, 64000.0, 0.0, 12345);
  KeyFrameSequence seq(cfg, n, 9.0);
  std::size_t mismatches = 0;
  for (std::uint64_t f = 0; f < 1000; ++f) {
    const auto a = seq.next();
    const auto b = key_frame(cfg, f, n, 9.0);
    mismatches += a.k_m != b.k_m || a.k_a != b.k_a;
  }

  // st = 1 s, g = 32000 counters/s, u = 128.
  SyncConfig clock;
  clock.st = 1.0;
  clock.g = 32000.0;
  clock.u = 128;
  bool counters = current_counter(clock, 1.5, 0.001) == 16032 && initial_counter(16032, 128) == 16000 &&
                  current_counter(clock, 2.0, 0.0) == 32000 && initial_counter(32000, 128) == 32000;
  clock.period = 1000;
  counters = counters && current_counter(clock, 1.5, 0.001) == 32 && frame_counter(clock, 8) == 24;
  bool clock_error = false;
  try {
    current_counter(clock, 0.9, 0.0);
  } catch (const Error& e) {
    clock_error = e.kind() == ErrorKind::clock;
  }
  return {mismatches == 0 && counters && clock_error,
          std::to_string(mismatches) + " mismatched frames of 1000; counter examples " + (counters ? "ok" : "wrong") +
              "; early receive " + (clock_error ? "rejected" : "accepted")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, 30, round_trips},   {2, 1, noise_anomaly}, {3, 60, no_wraps},     {4, 600, ber_vs_snr},
      {5, 600, ber_vs_delay}, {6, 30, ciphertext_autocorrelation}, {7, 30, spectral_occupancy}, {8, 60, uniformity},
      {9, 300, sync_trials},  {10, 10, keystream_access},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.limit_s;
    failures += !pass;
    std::printf("criterion %d: %s - %s [%.1fs%s]\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                secs > c.limit_s ? " over limit" : "");
    std::fflush(stdout);
  }
  return failures;
}
