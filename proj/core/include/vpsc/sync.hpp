#pragma once

// Receiver-side time-offset search. Key frames that should sit around the
// middle of a capture are derived from the receiver clock alone; each key
// trial-decrypts every N-sample window of the capture, and the whiteness
// metric of the result rises where a key meets its own frame.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vpsc/cipher.hpp"
#include "vpsc/keystream.hpp"
#include "vpsc/spectral.hpp"

namespace vpsc {

struct CaptureBuffer {
  std::vector<double> samples;
  double t_rx_head = 0.0;  // receiver time of samples[0]
  double f_s = 64000.0;
};

enum class MetricVariant { absolute, raw };

/// alpha = sum_{k=1}^{N-1} R[k] / R[0] over the linear autocorrelation, with
/// |R[k]| in the absolute variant. Throws ErrorKind::undefined_metric when R[0] == 0.
double whiteness_metric(std::span<const double> frame, MetricVariant variant = MetricVariant::absolute);

struct SyncOptions {
  std::size_t n_keys = 8;
  MetricVariant variant = MetricVariant::absolute;
  double threshold_sigmas = 4.0;
  /// Lags within this distance of the peak are left out of the background.
  std::size_t peak_exclusion = 2;
};

struct PeakStats {
  std::size_t peak_index = 0;
  double peak = 0.0;
  double background_mean = 0.0;
  double background_std = 0.0;

  double threshold(double sigmas) const noexcept { return background_mean + sigmas * background_std; }
  /// (peak - mean) / std of the background.
  double ratio() const noexcept;
};

PeakStats peak_stats(std::span<const double> trace, std::size_t exclusion);

struct SyncResult {
  double epsilon = 0.0;   // seconds, positive when the signal arrives late
  long lag = 0;           // samples
  long first_lag = 0;     // lag of averaged[0] and of every per_key[i][0]
  std::vector<double> averaged;
  std::vector<std::vector<double>> per_key;
  std::vector<std::uint64_t> frame_indices;
  PeakStats stats;
  double threshold = 0.0;
  bool detected = false;
};

/// The full scan without the detection verdict turned into an error.
SyncResult scan_alignment(const CaptureBuffer& buffer, const SyncConfig& sync_cfg,
                          const CipherConfig& cipher_cfg, const SyncOptions& options = {});

/// Solves for epsilon. Throws ErrorKind::sync_failure when the averaged peak
/// does not clear mean + threshold_sigmas * std of the background, and
/// ErrorKind::config when the capture cannot hold the requested keys.
SyncResult infer_epsilon(const CaptureBuffer& buffer, const SyncConfig& sync_cfg,
                         const CipherConfig& cipher_cfg, const SyncOptions& options = {});

}  // namespace vpsc
