#include "vpsc/sync.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vpsc/errors.hpp"

namespace vpsc {

double whiteness_metric(std::span<const double> frame, MetricVariant variant) {
  if (frame.empty()) throw Error(ErrorKind::undefined_metric, "whiteness metric of an empty frame");
  const auto r = autocorrelation(frame);
  if (!(r[0] > 0.0)) throw Error(ErrorKind::undefined_metric, "whiteness metric of an all-zero frame");
  double sum = 0.0;
  for (std::size_t k = 1; k < r.size(); ++k) sum += variant == MetricVariant::raw ? r[k] : std::abs(r[k]);
  return sum / r[0];
}

double PeakStats::ratio() const noexcept {
  if (!(background_std > 0.0)) return peak > background_mean ? INFINITY : 0.0;
  return (peak - background_mean) / background_std;
}

PeakStats peak_stats(std::span<const double> trace, std::size_t exclusion) {
  PeakStats st;
  if (trace.empty()) return st;
  st.peak_index = static_cast<std::size_t>(std::max_element(trace.begin(), trace.end()) - trace.begin());
  st.peak = trace[st.peak_index];
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const std::size_t dist = i > st.peak_index ? i - st.peak_index : st.peak_index - i;
    if (dist <= exclusion) continue;
    sum += trace[i];
    sq += trace[i] * trace[i];
    ++count;
  }
  if (count > 0) {
    st.background_mean = sum / static_cast<double>(count);
    st.background_std = std::sqrt(std::max(0.0, sq / static_cast<double>(count) - st.background_mean * st.background_mean));
  }
  return st;
}

SyncResult scan_alignment(const CaptureBuffer& buffer, const SyncConfig& sync_cfg,
                          const CipherConfig& cipher_cfg, const SyncOptions& options) {
  sync_cfg.validate();
  cipher_cfg.validate();
  const std::size_t n = cipher_cfg.n;
  const std::size_t len = buffer.samples.size();
  if (len < 3 * n) throw Error(ErrorKind::config, "capture must hold at least three frames");
  if (options.n_keys == 0) throw Error(ErrorKind::config, "n_keys must be >= 1");
  if (!(buffer.f_s > 0.0)) throw Error(ErrorKind::config, "capture sample rate must be positive");

  // Frame nearest the middle of the buffer on the receiver's uncorrected clock.
  const double t_mid = buffer.t_rx_head + static_cast<double>(len / 2) / buffer.f_s;
  const std::uint64_t mid_frame = initial_counter(current_counter(sync_cfg, t_mid, 0.0), sync_cfg.u) / sync_cfg.u;
  const std::uint64_t half = options.n_keys / 2;
  const std::uint64_t first = mid_frame > half ? mid_frame - half : 0;

  const double frame_seconds = static_cast<double>(sync_cfg.u) / sync_cfg.g;
  std::vector<long> expected(options.n_keys);
  SyncResult result;
  for (std::size_t i = 0; i < options.n_keys; ++i) {
    const std::uint64_t f = first + i;
    result.frame_indices.push_back(f);
    const double t_frame = sync_cfg.st + static_cast<double>(f) * frame_seconds;
    expected[i] = std::lround((t_frame - buffer.t_rx_head) * buffer.f_s);
  }

  // Lags every key can be evaluated at: 0 <= expected + lag <= len - n.
  const long max_shift = static_cast<long>(len - n);
  const long lag_lo = -*std::min_element(expected.begin(), expected.end());
  const long lag_hi = max_shift - *std::max_element(expected.begin(), expected.end());
  if (lag_hi - lag_lo < 2 * static_cast<long>(options.peak_exclusion) + 2) {
    throw Error(ErrorKind::config, "capture is too short for the requested number of keys");
  }
  const std::size_t span = static_cast<std::size_t>(lag_hi - lag_lo + 1);
  result.first_lag = lag_lo;
  result.averaged.assign(span, 0.0);

  for (std::size_t i = 0; i < options.n_keys; ++i) {
    const KeyFrame key = key_frame(sync_cfg, result.frame_indices[i], n, cipher_cfg.phi_effective());
    std::vector<double> trace(span);
    for (std::size_t j = 0; j < span; ++j) {
      const auto start = static_cast<std::size_t>(expected[i] + lag_lo + static_cast<long>(j));
      const std::span<const double> window(buffer.samples.data() + start, n);
      const auto plain = synthesize(decrypt(analyze(window), key, cipher_cfg));
      double alpha = 0.0;
      try {
        alpha = whiteness_metric(plain.view(), options.variant);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::undefined_metric) throw;
      }
      trace[j] = alpha;
      result.averaged[j] += alpha / static_cast<double>(options.n_keys);
    }
    result.per_key.push_back(std::move(trace));
  }

  result.stats = peak_stats(result.averaged, options.peak_exclusion);
  result.threshold = result.stats.threshold(options.threshold_sigmas);
  result.lag = lag_lo + static_cast<long>(result.stats.peak_index);
  result.epsilon = static_cast<double>(result.lag) / buffer.f_s;
  result.detected = result.stats.peak > result.threshold;
  return result;
}

SyncResult infer_epsilon(const CaptureBuffer& buffer, const SyncConfig& sync_cfg,
                         const CipherConfig& cipher_cfg, const SyncOptions& options) {
  auto result = scan_alignment(buffer, sync_cfg, cipher_cfg, options);
  if (!result.detected) {
    throw Error(ErrorKind::sync_failure, "no whiteness peak clears the detection threshold");
  }
  return result;
}

}  // namespace vpsc
