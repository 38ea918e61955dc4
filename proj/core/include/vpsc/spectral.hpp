#pragma once

// Frame-level conversion between real sample frames and polar spectra.
//
// Transform convention (repo-wide): unnormalized forward DFT,
//   X[k] = sum_n x[n] e^{-2 pi i k n / N},
// and 1/N on the inverse. A unit cosine therefore puts N/2 into each of its
// two conjugate bins. Angles live in [-pi, pi).

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace vpsc {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// N real time-domain samples of one cipher frame.
struct SignalFrame {
  std::vector<double> samples;

  SignalFrame() = default;
  explicit SignalFrame(std::vector<double> s) : samples(std::move(s)) {}

  std::size_t size() const noexcept { return samples.size(); }
  std::span<const double> view() const noexcept { return samples; }
};

/// Polar DFT of a real frame. Ciphertexts reuse this type.
struct SpectrumFrame {
  std::vector<double> magnitudes;
  std::vector<double> angles;

  std::size_t size() const noexcept { return magnitudes.size(); }

  std::complex<double> bin(std::size_t i) const {
    return std::polar(magnitudes[i], angles[i]);
  }
};

/// Uniform mid-tread quantizer over [lo, hi] with `levels` steps.
struct Quantizer {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t levels = 4096;

  double step() const noexcept { return (hi - lo) / static_cast<double>(levels - 1); }
  std::size_t index(double x) const noexcept;
  double value(std::size_t index) const noexcept;
  double apply(double x) const noexcept { return value(index(x)); }
};

bool is_power_of_two(std::size_t n) noexcept;

/// Throws ErrorKind::frame_length unless n == 2^k with k >= 3.
void require_frame_length(std::size_t n);

/// Builds a frame from raw samples, optionally snapping them to a quantizer.
/// Without a quantizer the samples are taken as continuous values.
SignalFrame ingest(std::span<const double> samples,
                   const std::optional<Quantizer>& quantizer = std::nullopt);

/// Maps theta onto [-pi, pi). Throws ErrorKind::numeric on non-finite input.
double wrap_angle(double theta);

SpectrumFrame analyze(std::span<const double> samples);
inline SpectrumFrame analyze(const SignalFrame& frame) { return analyze(frame.view()); }

/// Inverse of analyze. Throws ErrorKind::symmetry when the spectrum is not
/// the spectrum of a real signal (imaginary residue above tolerance).
SignalFrame synthesize(const SpectrumFrame& spectrum);

/// Checks the conjugate-symmetry structure in rectangular form. `rel_tol` is
/// relative to the largest magnitude in the frame (absolute floor 1e-12).
bool has_real_symmetry(const SpectrumFrame& spectrum, double rel_tol = 1e-9);

std::vector<std::complex<double>> to_rectangular(const SpectrumFrame& spectrum);
SpectrumFrame to_polar(std::span<const std::complex<double>> bins);

// General-length transforms used by the channel simulator and the metrics.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> in);
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> in);
std::vector<std::complex<double>> fft_real(std::span<const double> in);

/// Analytic signal x + j*H{x} of a real sequence (one-shot FFT method).
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

/// Linear (non-circular) autocorrelation R[k] = sum_n x[n] x[n+k], k = 0..N-1.
std::vector<double> autocorrelation(std::span<const double> x);

}  // namespace vpsc
