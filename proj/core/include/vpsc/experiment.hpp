#pragma once

// Evaluation runner: BER over AWGN and multipath, ciphertext autocorrelation,
// spectra and sync trials, plus their CSV/JSON writers.
//
// SNR convention: every snr_db in a spec is Eb/N0 of the *unencrypted*
// 16-QAM signal. The channel noise floor therefore depends only on the modem
// and the SNR, never on which cipher runs over it.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vpsc/channel.hpp"
#include "vpsc/cipher.hpp"
#include "vpsc/keystream.hpp"
#include "vpsc/modem.hpp"
#include "vpsc/sync.hpp"

namespace vpsc {

std::string_view library_version() noexcept;

enum class CipherKind { none, vpsc, fcs, alm, rsa };

std::string_view to_string(CipherKind kind) noexcept;
CipherKind parse_cipher_kind(std::string_view name);

struct VpscSettings {
  MitigationMode mode = MitigationMode::combined;
  /// lambda = lambda_sigmas * sigma0, sigma0 the per-component noise std of a bin.
  double lambda_sigmas = 10.0;
  /// Floor on lambda as a fraction of phi, used when there is no noise.
  double lambda_floor = 1e-3;
  unsigned psi_multiplier = 3;
  /// Defaults to 1.01 x the largest bin magnitude of any 16-QAM symbol.
  std::optional<double> phi;
};

struct AutocorrSettings {
  std::size_t frames = 64;
  std::size_t keys = 3;
  std::size_t max_lag = 256;
  double sine_hz = 8000.0;
};

struct SpectrumSettings {
  std::size_t frames = 64;
  double band_lo_hz = 4000.0;
  double band_hi_hz = 12000.0;
};

struct SyncTrialSettings {
  std::vector<std::size_t> delays{0, 17, 37, 101};
  std::vector<double> snr_db{kInfiniteSnr, 10.0};
  std::size_t n_keys = 8;
  std::size_t wrong_seed_trials = 100;
  std::size_t stream_frames = 24;
  std::size_t capture_offset_frames = 4;
  std::size_t capture_frames = 10;
};

struct ExperimentSpec {
  std::vector<CipherKind> ciphers{CipherKind::none, CipherKind::vpsc, CipherKind::fcs, CipherKind::alm,
                                  CipherKind::rsa};
  VpscSettings vpsc;
  ModemConfig modem;
  ChannelConfig channel;
  /// Apply the multipath taps in the BER-vs-SNR sweep as well.
  bool multipath = false;
  std::vector<double> snr_db{6, 8, 10, 12, 14, 16};
  std::vector<double> delay_scales{0, 2, 4, 8, 12, 16, 21, 26, 32, 40};
  double delay_snr_db = 20.0;
  std::size_t symbol_count = 10000;
  std::vector<std::uint64_t> seeds{1};
  std::string secret_seed = "7670736364656d6f";
  std::size_t quantizer_levels = 4096;
  std::size_t constellation_points = 256;
  AutocorrSettings autocorr;
  SpectrumSettings spectrum;
  SyncTrialSettings sync;

  std::size_t frame_length() const { return modem.samples_per_symbol(); }
  /// Throws ErrorKind::spec on any inconsistency.
  void validate() const;
};

ExperimentSpec parse_spec(std::string_view json_text);
ExperimentSpec load_spec(const std::filesystem::path& path);
/// Canonical JSON echo of the spec (infinite SNRs written as "inf").
std::string spec_to_json(const ExperimentSpec& spec);

/// Per-sample noise std giving Eb/N0 = ebn0_db for the unencrypted modem; 0 at +inf.
double noise_sigma(const ModemConfig& modem, double ebn0_db);
/// Average passband power of the unencrypted 16-QAM signal.
double reference_power(const ModemConfig& modem) noexcept;
/// Largest bin magnitude over the 16 clean symbol spectra.
double max_symbol_magnitude(const ModemConfig& modem);

/// VPSC parameters for a link whose per-sample noise std is `sigma`.
CipherConfig vpsc_cipher_config(const ExperimentSpec& spec, double sigma, const BandMask& mask = {});

/// Key material for (seed, key index): the secret seed followed by both
/// numbers in little-endian order.
std::vector<std::uint8_t> key_material(const ExperimentSpec& spec, std::uint64_t seed, std::uint64_t key_index);

struct BerRecord {
  CipherKind cipher = CipherKind::none;
  double snr_db = kInfiniteSnr;
  double delay_scale = 0.0;
  bool multipath = false;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_total = 0;

  double ber() const noexcept {
    return bits_total == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits_total);
  }
};

struct ConstellationPoint {
  CipherKind cipher = CipherKind::none;
  double snr_db = kInfiniteSnr;
  double delay_scale = 0.0;
  int sent = 0;  // constellation index
  double i = 0.0;
  double q = 0.0;
};

struct BerReport {
  std::vector<BerRecord> records;
  std::vector<ConstellationPoint> constellation;
};

/// One sweep point: random bits -> 16-QAM -> encrypt -> channel -> decrypt
/// -> hard decision, for symbol_count symbols under one seed.
BerRecord simulate_link(const ExperimentSpec& spec, CipherKind cipher, double snr_db, double delay_scale,
                        bool multipath, std::uint64_t seed, std::uint64_t point_index,
                        std::vector<ConstellationPoint>* constellation = nullptr);

/// BER vs SNR; records sum errors over all seeds.
BerReport run_ber_experiment(const ExperimentSpec& spec);
/// BER vs delay_scale with multipath at delay_snr_db.
BerReport run_ber_delay_experiment(const ExperimentSpec& spec);

struct AutocorrTrace {
  CipherKind cipher = CipherKind::none;
  std::string input;  // "qam" or "sine"
  std::size_t key = 0;
  std::vector<double> normalized;  // R[k] / R[0], k = 0..max_lag
  double max_off_peak = 0.0;       // max |R[k]| / R[0] over k >= 1
};

/// Fixed 16-QAM stream encrypted under `keys` distinct keys per cipher; RSA
/// additionally encrypts a sine. VPSC runs full band.
std::vector<AutocorrTrace> run_autocorrelation_analysis(const ExperimentSpec& spec);

struct SpectrumReport {
  CipherKind cipher = CipherKind::none;  // none = plaintext
  std::vector<double> psd;               // mean |X[k]|^2 / N over frames, k = 0..N/2
  double in_band_power = 0.0;
  double out_of_band_power = 0.0;
  double out_of_band_fraction = 0.0;  // out / (in + out)
  double mean_band_magnitude = 0.0;
  double expected_band_magnitude = 0.0;  // phi_effective / 2 + lambda for VPSC
};

std::vector<SpectrumReport> run_spectrum_report(const ExperimentSpec& spec);

/// A VPSC stream delayed by `injected` samples and captured from a point on
/// the receiver clock that ignores the delay.
struct SyncScenario {
  CaptureBuffer capture;
  SyncConfig tx_sync;
  CipherConfig cipher;
};

SyncScenario make_sync_scenario(const ExperimentSpec& spec, std::size_t injected, double snr_db,
                                std::uint64_t seed);

struct SyncTrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t injected = 0;
  double snr_db = kInfiniteSnr;
  bool wrong_seed = false;
  bool detected = false;
  long inferred = 0;
  long error = 0;
  double peak_ratio = 0.0;
  std::string status;
};

std::vector<SyncTrialRecord> run_sync_trials(const ExperimentSpec& spec);

void write_ber_csv(const std::filesystem::path& path, const std::vector<BerRecord>& records);
void write_constellation_csv(const std::filesystem::path& path, const std::vector<ConstellationPoint>& points);
void write_autocorr_csv(const std::filesystem::path& path, const std::vector<AutocorrTrace>& traces);
void write_spectrum_csv(const std::filesystem::path& path, const std::vector<SpectrumReport>& reports,
                        const ExperimentSpec& spec);
void write_spectrum_summary_csv(const std::filesystem::path& path, const std::vector<SpectrumReport>& reports);
void write_sync_csv(const std::filesystem::path& path, const std::vector<SyncTrialRecord>& records);
void write_manifest(const std::filesystem::path& path, const ExperimentSpec& spec, std::string_view experiment,
                    const std::vector<std::string>& files);

/// Shortest round-trip decimal form; "inf"/"-inf" for infinities.
std::string format_number(double x);

}  // namespace vpsc
