#pragma once

// Seeded channel impairments over whole real sample streams. Every function
// is a pure function of (input, config); the RNG is owned by the call.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace vpsc {

inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

struct Tap {
  double delay = 0.0;  // samples, before delay_scale
  double mean_power = 1.0;
  double doppler_hz = 0.0;
};

struct ChannelConfig {
  double snr_db = kInfiniteSnr;
  /// Signal power the SNR is measured against. When unset the measured mean
  /// square of the input is used, and an all-zero input falls back to 1.0.
  std::optional<double> reference_power;
  std::vector<Tap> taps = default_taps();
  double delay_scale = 1.0;
  std::uint64_t rng_seed = 0;
  std::size_t bulk_delay = 0;
  double f_s = 64000.0;
  /// Pins every fading magnitude at sqrt(mean_power); Doppler rotation stays.
  bool freeze_fading = false;
  std::size_t max_delay = 1u << 16;

  static std::vector<Tap> default_taps();

  /// Throws ErrorKind::config when an invariant does not hold.
  void validate() const;
};

/// Noise variance giving `snr_db` against `signal_power`; 0 at +inf.
double noise_variance(double signal_power, double snr_db);

std::vector<double> awgn(std::span<const double> s, const ChannelConfig& cfg);

/// Complex gain process of one tap over `length` samples: a unit-power
/// complex Gaussian low-passed by an AR(1) filter with pole exp(-2 pi f_D / f_s)
/// (a single static draw when f_D == 0), reduced to its Rayleigh magnitude,
/// scaled to the tap's mean power and rotated at the Doppler frequency.
std::vector<std::complex<double>> tap_gains(const Tap& tap, std::size_t tap_index,
                                            std::size_t length, const ChannelConfig& cfg);

/// Integer delay of tap t after delay_scale; throws ErrorKind::config past max_delay.
std::size_t scaled_delay(const Tap& tap, const ChannelConfig& cfg);

/// y[n] = sum_t Re{g_t[n] a[n - d_t]}, a the analytic signal of s. The output
/// has the input's length; echoes past the end are cut.
std::vector<double> multipath(std::span<const double> s, const ChannelConfig& cfg);

/// Prepends rho zero samples.
std::vector<double> delay(std::span<const double> s, std::size_t rho);

/// multipath, then bulk delay, then AWGN.
std::vector<double> apply_channel(std::span<const double> s, const ChannelConfig& cfg);

}  // namespace vpsc
