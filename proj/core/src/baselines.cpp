#include "vpsc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vpsc/errors.hpp"

namespace vpsc {
namespace {

std::vector<std::size_t> masked_interior_bins(std::size_t n, const BandMask& mask) {
  std::vector<std::size_t> bins;
  for (std::size_t i = 1; i < n / 2; ++i) {
    if (mask.empty() || mask[i]) bins.push_back(i);
  }
  return bins;
}

SignalFrame permute(const SignalFrame& s, const FcsKey& key, bool inverse) {
  const std::size_t n = s.size();
  validate_fcs_key(key, n);
  const SpectrumFrame in = analyze(s);
  SpectrumFrame out = in;
  for (std::size_t i = 1; i < n / 2; ++i) {
    const std::size_t j = key.destination[i];
    const std::size_t from = inverse ? j : i;
    const std::size_t to = inverse ? i : j;
    out.magnitudes[to] = in.magnitudes[from];
    out.angles[to] = in.angles[from];
    out.magnitudes[n - to] = in.magnitudes[n - from];
    out.angles[n - to] = in.angles[n - from];
  }
  return synthesize(out);
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

// Modular inverse of a mod m via extended Euclid; 0 if none exists.
std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m) {
  __int128 t = 0, new_t = 1;
  __int128 r = m, new_r = a % m;
  while (new_r != 0) {
    const __int128 q = r / new_r;
    t -= q * new_t;
    std::swap(t, new_t);
    r -= q * new_r;
    std::swap(r, new_r);
  }
  if (r != 1) return 0;
  if (t < 0) t += m;
  return static_cast<std::uint64_t>(t);
}

std::uint64_t next_prime(std::uint64_t x) {
  if (x <= 2) return 2;
  if (x % 2 == 0) ++x;
  while (!is_prime(x)) x += 2;
  return x;
}

}  // namespace

FcsKey fcs_identity_key(std::size_t n) {
  FcsKey key;
  key.destination.resize(n / 2 + 1);
  std::iota(key.destination.begin(), key.destination.end(), std::size_t{0});
  return key;
}

FcsKey fcs_key(const SyncConfig& config, std::uint64_t frame_index, std::size_t n,
               const BandMask& mask) {
  require_frame_length(n);
  config.validate();
  FcsKey key = fcs_identity_key(n);
  key.frame_index = frame_index;
  auto bins = masked_interior_bins(n, mask);
  if (bins.size() < 2) return key;

  Keystream stream(config.secret_seed, config.period);
  auto raw = stream.raw_values(frame_counter(config, frame_index), bins.size());
  auto shuffled = bins;
  for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
    const auto j = std::min(static_cast<std::size_t>(raw[i] * static_cast<double>(i + 1)), i);
    std::swap(shuffled[i], shuffled[j]);
  }
  for (std::size_t k = 0; k < bins.size(); ++k) key.destination[bins[k]] = shuffled[k];
  return key;
}

void validate_fcs_key(const FcsKey& key, std::size_t n) {
  require_frame_length(n);
  if (key.destination.size() != n / 2 + 1) throw Error(ErrorKind::key, "FCS key has the wrong length");
  if (key.destination[0] != 0 || key.destination[n / 2] != n / 2) {
    throw Error(ErrorKind::key, "FCS key must fix the DC and Nyquist bins");
  }
  std::vector<bool> seen(n / 2 + 1, false);
  for (std::size_t i = 0; i <= n / 2; ++i) {
    const std::size_t j = key.destination[i];
    if (j > n / 2 || seen[j]) throw Error(ErrorKind::key, "FCS key is not a bijection");
    seen[j] = true;
  }
}

SignalFrame fcs_encrypt(const SignalFrame& s, const FcsKey& key) { return permute(s, key, false); }

SignalFrame fcs_decrypt(const SignalFrame& s, const FcsKey& key) { return permute(s, key, true); }

AlmKey alm_key(const SyncConfig& config, std::uint64_t frame_index, std::size_t n) {
  config.validate();
  Keystream stream(config.secret_seed, config.period);
  auto raw = stream.raw_values(frame_counter(config, frame_index), n);
  AlmKey key;
  key.frame_index = frame_index;
  key.factors.resize(n);
  for (std::size_t i = 0; i < n; ++i) key.factors[i] = kAlmMinFactor + (1.0 - kAlmMinFactor) * raw[i];
  return key;
}

SignalFrame alm_encrypt(const SignalFrame& s, const AlmKey& key, const AlmRange& range) {
  if (key.factors.size() != s.size()) throw Error(ErrorKind::key, "ALM key length differs from frame");
  const double span = range.hi - range.lo;
  SignalFrame c;
  c.samples.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = 1.0 + (std::clamp(s.samples[i], range.lo, range.hi) - range.lo) / span;
    c.samples[i] = std::log(x * key.factors[i]);
  }
  return c;
}

SignalFrame alm_decrypt(const SignalFrame& c, const AlmKey& key, const AlmRange& range) {
  if (key.factors.size() != c.size()) throw Error(ErrorKind::key, "ALM key length differs from frame");
  const double span = range.hi - range.lo;
  SignalFrame s;
  s.samples.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double x = std::exp(c.samples[i]) / key.factors[i];
    s.samples[i] = range.lo + (x - 1.0) * span;
  }
  return s;
}

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t modulus) noexcept {
  if (modulus == 1) return 0;
  unsigned __int128 result = 1;
  unsigned __int128 b = base % modulus;
  while (exp > 0) {
    if (exp & 1) result = (result * b) % modulus;
    b = (b * b) % modulus;
    exp >>= 1;
  }
  return static_cast<std::uint64_t>(result);
}

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases make Miller-Rabin deterministic for all 64-bit n.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * x) % n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

RsaSampleKey make_rsa_key(std::span<const std::uint8_t> seed, const Quantizer& quantizer) {
  Keystream stream(seed, std::uint64_t{1} << 32);
  auto raw = stream.raw_values(0, 2);
  constexpr std::uint64_t kLow = 1u << 15;
  auto pick = [&](double u) { return next_prime(kLow + static_cast<std::uint64_t>(u * (kLow - 64))); };

  RsaSampleKey key;
  key.quantizer = quantizer;
  key.p = pick(raw[0]);
  key.q = pick(raw[1]);
  if (key.q == key.p) key.q = next_prime(key.p + 2);
  key.n = key.p * key.q;
  if (key.n < quantizer.levels) throw Error(ErrorKind::key, "RSA modulus smaller than the quantizer");
  const std::uint64_t lambda = (key.p - 1) / gcd(key.p - 1, key.q - 1) * (key.q - 1);
  key.e = 65537;
  while (gcd(key.e, lambda) != 1) key.e = next_prime(key.e + 2);
  key.d = mod_inverse(key.e, lambda);
  if (key.d == 0) throw Error(ErrorKind::key, "RSA exponent has no inverse");
  return key;
}

SignalFrame rsa_encrypt(const SignalFrame& s, const RsaSampleKey& key) {
  const auto& qz = key.quantizer;
  const double span = qz.hi - qz.lo;
  const double top = static_cast<double>(key.n - 1);
  SignalFrame c;
  c.samples.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::uint64_t m = qz.index(s.samples[i]);
    const std::uint64_t enc = mod_pow(m, key.e, key.n);
    c.samples[i] = qz.lo + static_cast<double>(enc) / top * span;
  }
  return c;
}

SignalFrame rsa_decrypt(const SignalFrame& c, const RsaSampleKey& key) {
  const auto& qz = key.quantizer;
  const double span = qz.hi - qz.lo;
  const double top = static_cast<double>(key.n - 1);
  SignalFrame s;
  s.samples.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double t = std::clamp(std::round((c.samples[i] - qz.lo) / span * top), 0.0, top);
    std::uint64_t m = mod_pow(static_cast<std::uint64_t>(t), key.d, key.n);
    // A corrupted cryptogram decrypts to an arbitrary residue; fold it back
    // into the quantizer's index range.
    if (m >= qz.levels) m %= qz.levels;
    s.samples[i] = qz.value(m);
  }
  return s;
}

}  // namespace vpsc
