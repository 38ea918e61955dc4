#include "vpsc/modem.hpp"

#include <cmath>

#include "vpsc/errors.hpp"

namespace vpsc {

std::size_t ModemConfig::samples_per_symbol() const {
  const double samples = t_sym * f_s;
  return static_cast<std::size_t>(std::llround(samples));
}

void ModemConfig::validate() const {
  if (!(f_s > 0.0) || !(f_c > 0.0) || !(t_sym > 0.0) || !(scale > 0.0)) {
    throw Error(ErrorKind::config, "modem parameters must be positive");
  }
  if (f_s < 2.0 * (f_c + guard_hz)) {
    throw Error(ErrorKind::config, "sample rate violates Nyquist for the carrier");
  }
  const double samples = t_sym * f_s;
  if (std::abs(samples - std::round(samples)) > 1e-6 || std::round(samples) < 1.0) {
    throw Error(ErrorKind::config, "symbol duration is not a whole number of samples");
  }
}

int gray_level(bool b0, bool b1) noexcept {
  const int g = (b0 ? 2 : 0) | (b1 ? 1 : 0);
  return g ^ (g >> 1);
}

std::pair<bool, bool> gray_bits(int level) noexcept {
  const int g = level ^ (level >> 1);
  return {(g & 2) != 0, (g & 1) != 0};
}

QamSymbol map_symbol(const SymbolBits& bits) noexcept {
  QamSymbol s;
  s.bits = bits;
  s.i = 2 * gray_level(bits[0], bits[1]) - 3;
  s.q = 2 * gray_level(bits[2], bits[3]) - 3;
  return s;
}

int constellation_index(const QamSymbol& s) noexcept { return 4 * ((s.i + 3) / 2) + (s.q + 3) / 2; }

SymbolBits bits_of_index(int index) noexcept {
  const auto [b0, b1] = gray_bits((index >> 2) & 3);
  const auto [b2, b3] = gray_bits(index & 3);
  return {b0, b1, b2, b3};
}

SignalFrame modulate(const SymbolBits& bits, const ModemConfig& cfg) {
  cfg.validate();
  const auto sym = map_symbol(bits);
  const std::size_t n = cfg.samples_per_symbol();
  const double w = kTwoPi * cfg.f_c / cfg.f_s;
  SignalFrame s;
  s.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = w * static_cast<double>(k);
    s.samples[k] = cfg.scale * (sym.i * std::cos(t) - sym.q * std::sin(t));
  }
  return s;
}

std::pair<double, double> estimate_point(std::span<const double> s, const ModemConfig& cfg) {
  const double w = kTwoPi * cfg.f_c / cfg.f_s;
  // Normal equations for s ~ a*cos - b*sin.
  double cc = 0, ss = 0, cs = 0, yc = 0, ys = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double c = std::cos(w * static_cast<double>(k));
    const double m = -std::sin(w * static_cast<double>(k));
    cc += c * c;
    ss += m * m;
    cs += c * m;
    yc += s[k] * c;
    ys += s[k] * m;
  }
  const double det = cc * ss - cs * cs;
  if (std::abs(det) < 1e-12) return {0.0, 0.0};
  const double a = (yc * ss - ys * cs) / det;
  const double b = (ys * cc - yc * cs) / det;
  return {a / cfg.scale, b / cfg.scale};
}

int decide_level(double x) noexcept {
  if (!std::isfinite(x)) return 0;
  int level = 0;
  for (double t : {-2.0, 0.0, 2.0}) {
    if (x > t) ++level;
  }
  return level;
}

SymbolBits demodulate(std::span<const double> s, const ModemConfig& cfg) {
  const auto [i, q] = estimate_point(s, cfg);
  const auto [b0, b1] = gray_bits(decide_level(i));
  const auto [b2, b3] = gray_bits(decide_level(q));
  return {b0, b1, b2, b3};
}

double qam16_ber_theory(double ebn0) noexcept {
  // Per-axis 4-PAM with levels +-1, +-3; Es = 10, Eb = Es / 4.
  const double esn0 = 4.0 * ebn0;
  const double sigma = std::sqrt(10.0 / (2.0 * esn0));
  auto q = [](double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); };
  return (3.0 * q(1.0 / sigma) + 2.0 * q(3.0 / sigma) - q(5.0 / sigma)) / 4.0;
}

}  // namespace vpsc
