#include "vpsc/channel.hpp"

#include <cmath>
#include <random>

#include "vpsc/errors.hpp"
#include "vpsc/spectral.hpp"

namespace vpsc {
namespace {

// Independent streams per purpose so adding taps never shifts the noise.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kNoiseStream = 0;
constexpr std::uint64_t kFadingStreamBase = 1000;

}  // namespace

std::vector<Tap> ChannelConfig::default_taps() {
  return {{0.0, 1.0, 0.0}, {5.0, 0.5, 30.0}, {12.0, 0.25, 60.0}};
}

void ChannelConfig::validate() const {
  if (std::isnan(snr_db)) throw Error(ErrorKind::config, "snr_db is NaN");
  if (reference_power && !(*reference_power > 0.0)) {
    throw Error(ErrorKind::config, "reference power must be positive");
  }
  if (!(f_s > 0.0)) throw Error(ErrorKind::config, "channel sample rate must be positive");
  if (!(delay_scale >= 0.0)) throw Error(ErrorKind::config, "delay_scale must be >= 0");
  if (taps.empty()) throw Error(ErrorKind::config, "channel needs at least one tap");
  if (taps.front().delay != 0.0) throw Error(ErrorKind::config, "first tap delay must be 0");
  for (const auto& t : taps) {
    if (!(t.delay >= 0.0)) throw Error(ErrorKind::config, "tap delays must be >= 0");
    if (!(t.mean_power > 0.0)) throw Error(ErrorKind::config, "tap mean powers must be > 0");
    if (!std::isfinite(t.doppler_hz)) throw Error(ErrorKind::config, "tap Doppler must be finite");
    scaled_delay(t, *this);
  }
}

double noise_variance(double signal_power, double snr_db) {
  if (snr_db == kInfiniteSnr) return 0.0;
  return signal_power / std::pow(10.0, snr_db / 10.0);
}

std::vector<double> awgn(std::span<const double> s, const ChannelConfig& cfg) {
  if (std::isnan(cfg.snr_db)) throw Error(ErrorKind::config, "snr_db is NaN");
  std::vector<double> out(s.begin(), s.end());
  if (cfg.snr_db == kInfiniteSnr || s.empty()) return out;

  double power = 1.0;
  if (cfg.reference_power) {
    power = *cfg.reference_power;
  } else {
    double sum = 0.0;
    for (double x : s) sum += x * x;
    if (sum > 0.0) power = sum / static_cast<double>(s.size());
  }
  auto rng = make_rng(cfg.rng_seed, kNoiseStream);
  std::normal_distribution<double> noise(0.0, std::sqrt(noise_variance(power, cfg.snr_db)));
  for (double& x : out) x += noise(rng);
  return out;
}

std::size_t scaled_delay(const Tap& tap, const ChannelConfig& cfg) {
  const double d = std::round(tap.delay * cfg.delay_scale);
  if (d > static_cast<double>(cfg.max_delay)) {
    throw Error(ErrorKind::config, "tap delay " + std::to_string(d) + " exceeds the delay buffer of " +
                                       std::to_string(cfg.max_delay) + " samples");
  }
  return static_cast<std::size_t>(d);
}

std::vector<std::complex<double>> tap_gains(const Tap& tap, std::size_t tap_index,
                                            std::size_t length, const ChannelConfig& cfg) {
  std::vector<std::complex<double>> g(length);
  const double amplitude = std::sqrt(tap.mean_power);
  const double w = kTwoPi * tap.doppler_hz / cfg.f_s;
  auto rotation = [&](std::size_t n) { return std::polar(1.0, w * static_cast<double>(n)); };

  if (cfg.freeze_fading) {
    for (std::size_t n = 0; n < length; ++n) g[n] = amplitude * rotation(n);
    return g;
  }

  auto rng = make_rng(cfg.rng_seed, kFadingStreamBase + tap_index);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  auto draw = [&] { return std::complex<double>(gauss(rng), gauss(rng)); };
  std::complex<double> h = draw();
  const double a = std::exp(-kTwoPi * std::abs(tap.doppler_hz) / cfg.f_s);
  const double drive = std::sqrt(1.0 - a * a);
  for (std::size_t n = 0; n < length; ++n) {
    if (n > 0 && tap.doppler_hz != 0.0) h = a * h + drive * draw();
    g[n] = amplitude * std::abs(h) * rotation(n);
  }
  return g;
}

std::vector<double> multipath(std::span<const double> s, const ChannelConfig& cfg) {
  cfg.validate();
  const std::size_t len = s.size();
  std::vector<double> out(len, 0.0);
  if (len == 0) return out;
  const auto a = analytic_signal(s);
  for (std::size_t t = 0; t < cfg.taps.size(); ++t) {
    const std::size_t d = scaled_delay(cfg.taps[t], cfg);
    if (d >= len) continue;
    const auto g = tap_gains(cfg.taps[t], t, len, cfg);
    for (std::size_t n = d; n < len; ++n) out[n] += (g[n] * a[n - d]).real();
  }
  return out;
}

std::vector<double> delay(std::span<const double> s, std::size_t rho) {
  std::vector<double> out(rho, 0.0);
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<double> apply_channel(std::span<const double> s, const ChannelConfig& cfg) {
  auto y = multipath(s, cfg);
  if (cfg.bulk_delay > 0) y = delay(y, cfg.bulk_delay);
  return awgn(y, cfg);
}

}  // namespace vpsc
