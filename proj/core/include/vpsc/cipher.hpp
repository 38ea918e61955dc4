#pragma once

// VPSC encryption and decryption over polar spectra.
//
// Magnitudes are enciphered by modular addition of the magnitude key and
// angles by addition on the 2*pi circle. Four noise-mitigation modes share
// the angle path and differ only in the magnitude arithmetic:
//
//   plain              c = ((m + k) mod phi) + lambda
//   preemptive_rise    c = ((m + k + psi) mod (phi + 2 psi)) + lambda
//   statistical_floor  encrypts like plain; the decrypter clamps impossible
//                      magnitudes and floors fallouts in [-psi, 0)
//   combined           c = ((m + lambda + k) mod (phi + 2 lambda)) + lambda
//
// Keys must be drawn with phi_effective() of the configuration in use.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vpsc/keystream.hpp"
#include "vpsc/spectral.hpp"

namespace vpsc {

enum class MitigationMode { plain, preemptive_rise, statistical_floor, combined };

std::string_view to_string(MitigationMode mode) noexcept;
MitigationMode parse_mitigation_mode(std::string_view name);

/// Symmetric per-bin encryption mask (true = encrypt). Empty means every bin.
using BandMask = std::vector<bool>;

BandMask full_band(std::size_t n);
/// Bins lo..hi inclusive (0 <= lo <= hi <= n/2) and their conjugates.
BandMask band_bins(std::size_t n, std::size_t lo, std::size_t hi);
/// Bins whose centre frequency lies in [lo_hz, hi_hz], mirrored.
BandMask band_hz(std::size_t n, double f_s, double lo_hz, double hi_hz);

struct CipherConfig {
  std::size_t n = 256;
  double phi = 1.0;
  double lambda = 0.0;
  double psi = 0.0;
  unsigned psi_multiplier = 1;
  MitigationMode mode = MitigationMode::plain;
  BandMask band_mask;

  /// Modulus the keys are drawn against: phi, phi + 2 psi (PR) or
  /// phi + 2 lambda (combined).
  double phi_effective() const noexcept;

  /// psi = psi_multiplier * sigma0.
  void set_psi_from_noise(double sigma0) { psi = psi_multiplier * sigma0; }

  bool masked(std::size_t bin) const noexcept { return band_mask.empty() || band_mask[bin]; }

  /// Throws ErrorKind::config when an invariant does not hold.
  void validate() const;
};

/// Positive remainder in [0, modulus). Values within 1e-12 * modulus below
/// zero are snapped to 0 so exact round trips survive floating-point rounding.
double mod_positive(double x, double modulus) noexcept;

SpectrumFrame encrypt_plain(const SpectrumFrame& m, const KeyFrame& k, const CipherConfig& cfg);
SpectrumFrame decrypt_plain(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg);

SpectrumFrame encrypt_pr(const SpectrumFrame& m, const KeyFrame& k, const CipherConfig& cfg);
SpectrumFrame decrypt_pr(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg);

/// Receiver-only statistical floor; pairs with encrypt_plain.
SpectrumFrame decrypt_sf(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg);

SpectrumFrame encrypt_combined(const SpectrumFrame& m, const KeyFrame& k, const CipherConfig& cfg);
SpectrumFrame decrypt_combined(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg);

/// Mode-dispatched spectrum encryption/decryption.
SpectrumFrame encrypt(const SpectrumFrame& m, const KeyFrame& k, const CipherConfig& cfg);
SpectrumFrame decrypt(const SpectrumFrame& c, const KeyFrame& k, const CipherConfig& cfg);

/// analyze -> encrypt -> synthesize, and the inverse chain.
SignalFrame encrypt_frame(const SignalFrame& s, const KeyFrame& k, const CipherConfig& cfg);
SignalFrame decrypt_frame(const SignalFrame& s, const KeyFrame& k, const CipherConfig& cfg);

}  // namespace vpsc
