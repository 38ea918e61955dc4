#include "vpsc/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "vpsc/errors.hpp"

namespace vpsc {
namespace {

enum class PlanKind { forward, backward, real_forward };

// FFTW planning is not thread-safe, execution with the new-array API is.
// Plans are created once per (kind, n) under a lock and reused afterwards.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(PlanKind kind, std::size_t n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(kind, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    auto* cin = fftw_alloc_complex(n);
    auto* cout = fftw_alloc_complex(n);
    auto* rin = fftw_alloc_real(n);
    switch (kind) {
      case PlanKind::forward:
        plan = fftw_plan_dft_1d(len, cin, cout, FFTW_FORWARD, flags);
        break;
      case PlanKind::backward:
        plan = fftw_plan_dft_1d(len, cin, cout, FFTW_BACKWARD, flags);
        break;
      case PlanKind::real_forward:
        plan = fftw_plan_dft_r2c_1d(len, rin, cout, flags);
        break;
    }
    fftw_free(cin);
    fftw_free(cout);
    fftw_free(rin);
    if (plan == nullptr) throw Error(ErrorKind::numeric, "FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<PlanKind, std::size_t>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

void transform(PlanKind kind, std::span<const std::complex<double>> in,
               std::vector<std::complex<double>>& out) {
  out.resize(in.size());
  if (in.empty()) return;
  // FFTW may not preserve the input of an out-of-place c2c transform for all
  // algorithms, so it gets a private copy.
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft(plan_cache().get(kind, in.size()), as_fftw(scratch.data()),
                   as_fftw(out.data()));
}

}  // namespace

std::size_t Quantizer::index(double x) const noexcept {
  const double t = (x - lo) / (hi - lo) * static_cast<double>(levels - 1);
  const double r = std::clamp(std::round(t), 0.0, static_cast<double>(levels - 1));
  return static_cast<std::size_t>(r);
}

double Quantizer::value(std::size_t i) const noexcept {
  return lo + static_cast<double>(i) * step();
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

void require_frame_length(std::size_t n) {
  if (!is_power_of_two(n) || n < 8) {
    throw Error(ErrorKind::frame_length,
                "frame length must be a power of two >= 8, got " + std::to_string(n));
  }
}

SignalFrame ingest(std::span<const double> samples, const std::optional<Quantizer>& quantizer) {
  require_frame_length(samples.size());
  SignalFrame frame{std::vector<double>(samples.begin(), samples.end())};
  if (quantizer) {
    for (double& s : frame.samples) s = quantizer->apply(s);
  }
  return frame;
}

double wrap_angle(double theta) {
  if (!std::isfinite(theta)) throw Error(ErrorKind::numeric, "non-finite angle");
  double r = std::fmod(theta + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  double out = r - kPi;
  if (out >= kPi) out = -kPi;
  return out;
}

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> in) {
  std::vector<std::complex<double>> out;
  transform(PlanKind::forward, in, out);
  return out;
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> in) {
  std::vector<std::complex<double>> out;
  transform(PlanKind::backward, in, out);
  const double scale = in.empty() ? 1.0 : 1.0 / static_cast<double>(in.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<std::complex<double>> fft_real(std::span<const double> in) {
  const std::size_t n = in.size();
  std::vector<std::complex<double>> out(n);
  if (n == 0) return out;
  std::vector<double> scratch(in.begin(), in.end());
  fftw_execute_dft_r2c(plan_cache().get(PlanKind::real_forward, n), scratch.data(),
                       as_fftw(out.data()));
  // r2c fills bins 0..n/2; the rest follow from conjugate symmetry.
  for (std::size_t k = n / 2 + 1; k < n; ++k) out[k] = std::conj(out[n - k]);
  return out;
}

std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  auto spec = fft_real(x);
  // Keep DC (and Nyquist for even n), double positive frequencies, drop negative.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (k < (n + 1) / 2) {
      spec[k] *= 2.0;
    } else if (n % 2 == 0 && k == half) {
      // Nyquist bin stays as is.
    } else {
      spec[k] = 0.0;
    }
  }
  auto a = ifft(spec);
  // The real part is the input by construction; restore it bit-exactly.
  for (std::size_t i = 0; i < n; ++i) a[i] = {x[i], a[i].imag()};
  return a;
}

std::vector<double> autocorrelation(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> r(n, 0.0);
  if (n == 0) return r;
  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  std::vector<double> padded(m, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  auto spec = fft_real(padded);
  for (auto& v : spec) v = std::norm(v);
  auto back = ifft(spec);
  for (std::size_t k = 0; k < n; ++k) r[k] = back[k].real();
  return r;
}

std::vector<std::complex<double>> to_rectangular(const SpectrumFrame& spectrum) {
  std::vector<std::complex<double>> out(spectrum.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = spectrum.bin(i);
  return out;
}

SpectrumFrame to_polar(std::span<const std::complex<double>> bins) {
  SpectrumFrame s;
  s.magnitudes.resize(bins.size());
  s.angles.resize(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) {
    s.magnitudes[i] = std::abs(bins[i]);
    s.angles[i] = wrap_angle(std::arg(bins[i]));
  }
  return s;
}

SpectrumFrame analyze(std::span<const double> samples) {
  const std::size_t n = samples.size();
  require_frame_length(n);
  std::vector<double> scratch(samples.begin(), samples.end());
  std::vector<std::complex<double>> half(n / 2 + 1);
  fftw_execute_dft_r2c(plan_cache().get(PlanKind::real_forward, n), scratch.data(),
                       as_fftw(half.data()));

  SpectrumFrame s;
  s.magnitudes.assign(n, 0.0);
  s.angles.assign(n, 0.0);
  // DC and Nyquist are real for a real input; a negative value is encoded as
  // angle -pi so magnitudes stay nonnegative.
  for (std::size_t k : {std::size_t{0}, n / 2}) {
    const double re = half[k].real();
    s.magnitudes[k] = std::abs(re);
    s.angles[k] = re < 0.0 ? -kPi : 0.0;
  }
  for (std::size_t k = 1; k < n / 2; ++k) {
    s.magnitudes[k] = std::abs(half[k]);
    s.angles[k] = wrap_angle(std::arg(half[k]));
    s.magnitudes[n - k] = s.magnitudes[k];
    s.angles[n - k] = wrap_angle(-s.angles[k]);
  }
  return s;
}

bool has_real_symmetry(const SpectrumFrame& spectrum, double rel_tol) {
  const std::size_t n = spectrum.size();
  if (spectrum.angles.size() != n || n == 0) return false;
  const double peak = *std::max_element(spectrum.magnitudes.begin(), spectrum.magnitudes.end());
  const double tol = std::max(rel_tol * peak, 1e-12);
  for (double m : spectrum.magnitudes) {
    if (!(m >= 0.0)) return false;
  }
  for (std::size_t k : {std::size_t{0}, n / 2}) {
    if (std::abs(spectrum.bin(k).imag()) > tol) return false;
  }
  for (std::size_t k = 1; k < n / 2; ++k) {
    if (std::abs(spectrum.bin(k) - std::conj(spectrum.bin(n - k))) > tol) return false;
  }
  return true;
}

SignalFrame synthesize(const SpectrumFrame& spectrum) {
  const std::size_t n = spectrum.size();
  require_frame_length(n);
  if (spectrum.angles.size() != n) {
    throw Error(ErrorKind::symmetry, "magnitude and angle vectors differ in length");
  }
  auto bins = to_rectangular(spectrum);
  auto time = ifft(bins);

  double peak = 0.0;
  for (const auto& b : bins) peak = std::max(peak, std::abs(b));
  // Residue tolerance: 1e-9 absolute, scaled up for spectra whose bins are
  // large enough that rounding alone exceeds it.
  const double tol = std::max(1e-9, 1e-9 * peak / static_cast<double>(n));
  SignalFrame out;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(time[i].imag()) > tol) {
      throw Error(ErrorKind::symmetry,
                  "spectrum is not conjugate-symmetric: imaginary residue " +
                      std::to_string(time[i].imag()) + " at sample " + std::to_string(i));
    }
    out.samples[i] = time[i].real();
  }
  return out;
}

}  // namespace vpsc
