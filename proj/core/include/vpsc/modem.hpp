#pragma once

// Single-carrier 16-QAM with per-axis reflected Gray coding and hard
// decisions. One symbol occupies T_sym * f_s samples of a real passband
// signal s[n] = scale * (I cos(w n) - Q sin(w n)), w = 2 pi f_c / f_s.

#include <array>
#include <cstddef>
#include <utility>

#include "vpsc/spectral.hpp"

namespace vpsc {

using SymbolBits = std::array<bool, 4>;

/// bits[0..1] select the I level and bits[2..3] the Q level.
struct QamSymbol {
  SymbolBits bits{};
  int i = -3;
  int q = -3;
};

struct ModemConfig {
  double f_c = 8000.0;
  double f_s = 64000.0;
  double t_sym = 0.004;
  double scale = 1.0;
  /// Extra bandwidth reserved above the carrier for the Nyquist check.
  double guard_hz = 0.0;

  std::size_t samples_per_symbol() const;
  /// Throws ErrorKind::config on a Nyquist violation or a fractional symbol length.
  void validate() const;
};

/// Level index 0..3 (amplitude -3, -1, 1, 3) for a Gray-coded bit pair.
int gray_level(bool b0, bool b1) noexcept;
std::pair<bool, bool> gray_bits(int level) noexcept;

QamSymbol map_symbol(const SymbolBits& bits) noexcept;
/// 4 * I level + Q level, 0..15.
int constellation_index(const QamSymbol& s) noexcept;
SymbolBits bits_of_index(int index) noexcept;

SignalFrame modulate(const SymbolBits& bits, const ModemConfig& cfg);

/// Least-squares (I, Q) estimate of one symbol, in constellation units.
std::pair<double, double> estimate_point(std::span<const double> s, const ModemConfig& cfg);

/// Nearest level on one axis; a value exactly on a boundary goes to the
/// lower level.
int decide_level(double x) noexcept;

SymbolBits demodulate(std::span<const double> s, const ModemConfig& cfg);
inline SymbolBits demodulate(const SignalFrame& s, const ModemConfig& cfg) {
  return demodulate(s.view(), cfg);
}

/// Exact Gray-coded 16-QAM bit error rate over AWGN at Eb/N0 (linear).
double qam16_ber_theory(double ebn0) noexcept;

}  // namespace vpsc
