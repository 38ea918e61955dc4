#include "vpsc/cipher.hpp"

#include <algorithm>
#include <cmath>

#include "vpsc/errors.hpp"

namespace vpsc {
namespace {

void check_shapes(const SpectrumFrame& x, const KeyFrame& k, const CipherConfig& cfg) {
  cfg.validate();
  if (x.magnitudes.size() != cfg.n || x.angles.size() != cfg.n) {
    throw Error(ErrorKind::frame_length, "spectrum length does not match the cipher frame length");
  }
  if (k.k_m.size() != cfg.n || k.k_a.size() != cfg.n) {
    throw Error(ErrorKind::key, "key frame length does not match the cipher frame length");
  }
}

void check_phi(const SpectrumFrame& m, const CipherConfig& cfg) {
  for (std::size_t i = 0; i < cfg.n; ++i) {
    if (cfg.masked(i) && m.magnitudes[i] >= cfg.phi) {
      throw Error(ErrorKind::phi_violation,
                  "plaintext magnitude " + std::to_string(m.magnitudes[i]) + " at bin " +
                      std::to_string(i) + " is not below phi = " + std::to_string(cfg.phi));
    }
  }
}

// A decrypted magnitude can come out negative under noise in the PR and
// combined modes. The bin value is kept; only its polar form is normalised.
void store_bin(SpectrumFrame& out, std::size_t i, double magnitude, double angle) {
  if (magnitude < 0.0) {
    out.magnitudes[i] = -magnitude;
    out.angles[i] = wrap_angle(angle + kPi);
  } else {
    out.magnitudes[i] = magnitude;
    out.angles[i] = angle;
  }
}

template <typename MagnitudeFn>
SpectrumFrame encrypt_with(const SpectrumFrame& m, const KeyFrame& k, const CipherConfig& cfg,
                           MagnitudeFn&& magnitude) {
  check_shapes(m, k, cfg);
  check_phi(m, cfg);
  SpectrumFrame c = m;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    if (!cfg.masked(i)) continue;
    c.magnitudes[i] = magnitude(m.magnitudes[i], k.k_m[i]);
    c.angles[i] = wrap_angle(m.angles[i] + k.k_a[i]);
  }
  return c;
}

template <typename MagnitudeFn>
SpectrumFrame decrypt_with(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg,
                           MagnitudeFn&& magnitude) {
  check_shapes(c, k, cfg);
  SpectrumFrame m = c;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    if (!cfg.masked(i)) continue;
    store_bin(m, i, magnitude(c.magnitudes[i], k.k_m[i]), wrap_angle(c.angles[i] - k.k_a[i]));
  }
  return m;
}

}  // namespace

std::string_view to_string(MitigationMode mode) noexcept {
  switch (mode) {
    case MitigationMode::plain: return "plain";
    case MitigationMode::preemptive_rise: return "pr";
    case MitigationMode::statistical_floor: return "sf";
    case MitigationMode::combined: return "combined";
  }
  return "unknown";
}

MitigationMode parse_mitigation_mode(std::string_view name) {
  if (name == "plain") return MitigationMode::plain;
  if (name == "pr" || name == "preemptive_rise") return MitigationMode::preemptive_rise;
  if (name == "sf" || name == "statistical_floor") return MitigationMode::statistical_floor;
  if (name == "combined") return MitigationMode::combined;
  throw Error(ErrorKind::config, "unknown mitigation mode '" + std::string(name) + "'");
}

BandMask full_band(std::size_t n) { return BandMask(n, true); }

BandMask band_bins(std::size_t n, std::size_t lo, std::size_t hi) {
  if (lo > hi || hi > n / 2) throw Error(ErrorKind::config, "band bins out of range");
  BandMask mask(n, false);
  for (std::size_t i = lo; i <= hi; ++i) {
    mask[i] = true;
    mask[(n - i) % n] = true;
  }
  return mask;
}

BandMask band_hz(std::size_t n, double f_s, double lo_hz, double hi_hz) {
  if (!(lo_hz <= hi_hz) || lo_hz < 0.0 || hi_hz > f_s / 2.0) {
    throw Error(ErrorKind::config, "band edges must satisfy 0 <= lo <= hi <= f_s/2");
  }
  const double bin_hz = f_s / static_cast<double>(n);
  const auto lo = static_cast<std::size_t>(std::ceil(lo_hz / bin_hz - 1e-9));
  const auto hi = static_cast<std::size_t>(std::floor(hi_hz / bin_hz + 1e-9));
  return band_bins(n, lo, std::min(hi, n / 2));
}

double CipherConfig::phi_effective() const noexcept {
  switch (mode) {
    case MitigationMode::preemptive_rise: return phi + 2.0 * psi;
    case MitigationMode::combined: return phi + 2.0 * lambda;
    case MitigationMode::plain:
    case MitigationMode::statistical_floor: return phi;
  }
  return phi;
}

void CipherConfig::validate() const {
  require_frame_length(n);
  if (!(phi > 0.0) || !std::isfinite(phi)) throw Error(ErrorKind::config, "phi must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::config, "lambda must be >= 0");
  if (!(psi >= 0.0) || !std::isfinite(psi)) throw Error(ErrorKind::config, "psi must be >= 0");
  if (psi_multiplier == 0) throw Error(ErrorKind::config, "psi multiplier must be positive");
  if (mode == MitigationMode::combined && !(lambda > 0.0)) {
    throw Error(ErrorKind::config, "combined mode requires lambda > 0");
  }
  if (!band_mask.empty()) {
    if (band_mask.size() != n) throw Error(ErrorKind::config, "band mask length differs from N");
    for (std::size_t i = 1; i < n; ++i) {
      if (band_mask[i] != band_mask[n - i]) throw Error(ErrorKind::config, "band mask is not symmetric");
    }
  }
}

double mod_positive(double x, double modulus) noexcept {
  double r = std::fmod(x, modulus);
  if (r < 0.0) r = (r > -1e-12 * modulus) ? 0.0 : r + modulus;
  if (r >= modulus) r -= modulus;
  return r;
}

SpectrumFrame encrypt_plain(const SpectrumFrame& m, const KeyFrame& k, const CipherConfig& cfg) {
  return encrypt_with(m, k, cfg, [&](double mm, double km) {
    return mod_positive(mm + km, cfg.phi) + cfg.lambda;
  });
}

SpectrumFrame decrypt_plain(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg) {
  return decrypt_with(c, k, cfg, [&](double cm, double km) {
    return mod_positive((cm - cfg.lambda) - km, cfg.phi);
  });
}

SpectrumFrame encrypt_pr(const SpectrumFrame& m, const KeyFrame& k, const CipherConfig& cfg) {
  const double phi_prime = cfg.phi + 2.0 * cfg.psi;
  return encrypt_with(m, k, cfg, [&](double mm, double km) {
    return mod_positive(mm + km + cfg.psi, phi_prime) + cfg.lambda;
  });
}

SpectrumFrame decrypt_pr(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg) {
  const double phi_prime = cfg.phi + 2.0 * cfg.psi;
  return decrypt_with(c, k, cfg, [&](double cm, double km) {
    return mod_positive((cm - cfg.lambda) - km, phi_prime) - cfg.psi;
  });
}

SpectrumFrame decrypt_sf(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg) {
  const double eps_small = 1e-9 * cfg.phi;
  return decrypt_with(c, k, cfg, [&](double cm, double km) {
    double x = cm - cfg.lambda;
    if (x >= cfg.phi) x = cfg.phi - eps_small;  // impossible magnitude
    x -= km;
    if (x >= -cfg.psi && x < 0.0) x = 0.0;  // unlikely fallout
    return mod_positive(x, cfg.phi);
  });
}

SpectrumFrame encrypt_combined(const SpectrumFrame& m, const KeyFrame& k, const CipherConfig& cfg) {
  const double modulus = cfg.phi + 2.0 * cfg.lambda;
  return encrypt_with(m, k, cfg, [&](double mm, double km) {
    return mod_positive(mm + cfg.lambda + km, modulus) + cfg.lambda;
  });
}

SpectrumFrame decrypt_combined(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg) {
  const double modulus = cfg.phi + 2.0 * cfg.lambda;
  const double ceiling = cfg.phi + 3.0 * cfg.lambda;
  return decrypt_with(c, k, cfg, [&](double cm, double km) {
    double x = std::min(cm, ceiling);  // impossible magnitudes
    x -= cfg.lambda;
    if (x < 0.0) x = 0.0;
    return mod_positive(x - km, modulus) - cfg.lambda;
  });
}

SpectrumFrame encrypt(const SpectrumFrame& m, const KeyFrame& k, const CipherConfig& cfg) {
  switch (cfg.mode) {
    case MitigationMode::plain:
    case MitigationMode::statistical_floor: return encrypt_plain(m, k, cfg);
    case MitigationMode::preemptive_rise: return encrypt_pr(m, k, cfg);
    case MitigationMode::combined: return encrypt_combined(m, k, cfg);
  }
  throw Error(ErrorKind::config, "unknown mitigation mode");
}

SpectrumFrame decrypt(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg) {
  switch (cfg.mode) {
    case MitigationMode::plain: return decrypt_plain(c, k, cfg);
    case MitigationMode::statistical_floor: return decrypt_sf(c, k, cfg);
    case MitigationMode::preemptive_rise: return decrypt_pr(c, k, cfg);
    case MitigationMode::combined: return decrypt_combined(c, k, cfg);
  }
  throw Error(ErrorKind::config, "unknown mitigation mode");
}

SignalFrame encrypt_frame(const SignalFrame& s, const KeyFrame& k, const CipherConfig& cfg) {
  return synthesize(encrypt(analyze(s), k, cfg));
}

SignalFrame decrypt_frame(const SignalFrame& s, const KeyFrame& k, const CipherConfig& cfg) {
  return synthesize(decrypt(analyze(s), k, cfg));
}

}  // namespace vpsc
