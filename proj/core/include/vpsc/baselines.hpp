#pragma once

// Comparison signal ciphers: frequency component scrambling (FCS), amplitude
// log masking (ALM) and sample-wise textbook RSA. They are implemented as
// described, weaknesses included; they exist to be measured against.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vpsc/cipher.hpp"
#include "vpsc/keystream.hpp"
#include "vpsc/spectral.hpp"

namespace vpsc {

/// Permutation of the masked bins of 1..N/2-1. destination[i] is where the
/// component of bin i moves; conjugate bins follow their partner.
struct FcsKey {
  std::vector<std::size_t> destination;  // length N/2 + 1
  std::uint64_t frame_index = 0;
};

/// Keystream-seeded Fisher-Yates shuffle over the masked bins.
FcsKey fcs_key(const SyncConfig& config, std::uint64_t frame_index, std::size_t n,
               const BandMask& mask = {});
FcsKey fcs_identity_key(std::size_t n);
/// Throws ErrorKind::key unless the key is a bijection that fixes DC and Nyquist.
void validate_fcs_key(const FcsKey& key, std::size_t n);

SignalFrame fcs_encrypt(const SignalFrame& s, const FcsKey& key);
SignalFrame fcs_decrypt(const SignalFrame& s, const FcsKey& key);

struct AlmKey {
  std::vector<double> factors;
  std::uint64_t frame_index = 0;
};

inline constexpr double kAlmMinFactor = 0.1;

/// Factors uniform on [0.1, 1.0).
AlmKey alm_key(const SyncConfig& config, std::uint64_t frame_index, std::size_t n);

/// Affine map of the quantizer range [lo, hi] onto [1, 2] ahead of the log.
/// Samples outside the range are clamped to it.
struct AlmRange {
  double lo = -1.0;
  double hi = 1.0;
};

SignalFrame alm_encrypt(const SignalFrame& s, const AlmKey& key, const AlmRange& range);
SignalFrame alm_decrypt(const SignalFrame& c, const AlmKey& key, const AlmRange& range);

struct RsaSampleKey {
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  std::uint64_t n = 0;
  std::uint64_t e = 0;
  std::uint64_t d = 0;
  Quantizer quantizer;
};

/// Desk-scale key: two primes in [2^15, 2^16) picked from the keystream of
/// `seed`, e = 65537 (or the next prime coprime to lcm(p-1, q-1)).
RsaSampleKey make_rsa_key(std::span<const std::uint8_t> seed, const Quantizer& quantizer);

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t modulus) noexcept;
bool is_prime(std::uint64_t n) noexcept;

/// Quantize, raise to e mod n, then rescale [0, n) onto [lo, hi].
SignalFrame rsa_encrypt(const SignalFrame& s, const RsaSampleKey& key);
SignalFrame rsa_decrypt(const SignalFrame& c, const RsaSampleKey& key);

}  // namespace vpsc
