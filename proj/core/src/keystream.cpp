#include "vpsc/keystream.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "vpsc/errors.hpp"
#include "vpsc/spectral.hpp"

namespace vpsc {
namespace {

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};

double to_unit(std::uint64_t word) {
  // Top 53 bits keep the result strictly below 1.0 in double precision.
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace

void SyncConfig::validate() const {
  if (period == 0) throw Error(ErrorKind::config, "counter period must be positive");
  if (sc >= period) throw Error(ErrorKind::config, "seed counter must be below the period");
  if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorKind::config, "generation rate must be positive");
  if (u == 0) throw Error(ErrorKind::config, "counters per frame must be >= 1");
  if (!std::isfinite(st)) throw Error(ErrorKind::config, "start time must be finite");
}

SyncConfig SyncConfig::for_frames(std::vector<std::uint8_t> seed, std::size_t n, double f_s,
                                  double start_time, std::uint64_t seed_counter) {
  SyncConfig cfg;
  cfg.secret_seed = std::move(seed);
  cfg.u = counters_per_frame(n);
  cfg.g = static_cast<double>(cfg.u) * f_s / static_cast<double>(n);
  cfg.st = start_time;
  cfg.sc = seed_counter;
  return cfg;
}

std::vector<std::uint8_t> parse_hex(std::string_view hex) {
  if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
  if (hex.size() % 2 != 0) throw Error(ErrorKind::config, "hex string has odd length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorKind::config, "invalid hex digit in seed");
    out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Keystream::Keystream(std::span<const std::uint8_t> secret_seed, std::uint64_t period)
    : period_(period) {
  if (period == 0) throw Error(ErrorKind::config, "counter period must be positive");
  SHA256(secret_seed.data(), secret_seed.size(), key_.data());
}

std::vector<double> Keystream::raw_values(std::uint64_t counter, std::size_t count) const {
  if (counter >= period_) {
    throw Error(ErrorKind::counter, "counter " + std::to_string(counter) +
                                        " outside period " + std::to_string(period_));
  }
  std::vector<double> out;
  out.reserve(count);
  if (count == 0) return out;

  const std::size_t blocks = (count + kValuesPerCounter - 1) / kValuesPerCounter;
  std::vector<std::uint8_t> in(blocks * 16, 0);
  std::uint64_t c = counter;
  for (std::size_t b = 0; b < blocks; ++b) {
    // 128-bit big-endian counter block; the high 64 bits stay zero.
    for (int i = 0; i < 8; ++i) in[b * 16 + 8 + i] = static_cast<std::uint8_t>(c >> (56 - 8 * i));
    c = (c + 1 == period_) ? 0 : c + 1;
  }

  std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter> ctx(EVP_CIPHER_CTX_new());
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ecb(), nullptr, key_.data(), nullptr) != 1) {
    throw Error(ErrorKind::numeric, "AES initialisation failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  std::vector<std::uint8_t> ks(in.size());
  int produced = 0;
  if (EVP_EncryptUpdate(ctx.get(), ks.data(), &produced, in.data(), static_cast<int>(in.size())) != 1 ||
      static_cast<std::size_t>(produced) != in.size()) {
    throw Error(ErrorKind::numeric, "AES keystream generation failed");
  }

  for (std::size_t v = 0; v < count; ++v) {
    std::uint64_t word = 0;
    for (int i = 0; i < 8; ++i) word |= std::uint64_t{ks[v * 8 + i]} << (8 * i);
    out.push_back(to_unit(word));
  }
  return out;
}

std::uint64_t counters_per_frame(std::size_t n) noexcept {
  return (n + Keystream::kValuesPerCounter - 1) / Keystream::kValuesPerCounter;
}

std::uint64_t frame_counter(const SyncConfig& config, std::uint64_t frame_index) {
  const unsigned __int128 c =
      static_cast<unsigned __int128>(config.sc) +
      static_cast<unsigned __int128>(frame_index) * config.u;
  return static_cast<std::uint64_t>(c % config.period);
}

KeyFrame assemble_key_frame(std::span<const double> raw, std::size_t n, double phi_effective,
                            std::uint64_t frame_index) {
  require_frame_length(n);
  if (raw.size() < n) throw Error(ErrorKind::key, "not enough keystream values for a key frame");
  const std::size_t half = n / 2;
  KeyFrame k;
  k.frame_index = frame_index;
  k.k_m.assign(n, 0.0);
  k.k_a.assign(n, 0.0);

  // k_m = [0, v_1..v_{N/2}, mirror(v_1..v_{N/2-1})]
  for (std::size_t i = 1; i <= half; ++i) k.k_m[i] = raw[i - 1] * phi_effective;
  for (std::size_t i = 1; i < half; ++i) k.k_m[n - i] = k.k_m[i];

  // k_a = [a, -mirror(a)] with the DC and Nyquist angles pinned to 0 so the
  // cryptogram stays real. a[0] is drawn but unused.
  for (std::size_t i = 1; i < half; ++i) {
    k.k_a[i] = wrap_angle(-kPi + kTwoPi * raw[half + i]);
    k.k_a[n - i] = wrap_angle(-k.k_a[i]);
  }
  return k;
}

KeyFrame key_frame(const SyncConfig& config, std::uint64_t frame_index, std::size_t n,
                   double phi_effective) {
  config.validate();
  if (config.u < counters_per_frame(n)) {
    throw Error(ErrorKind::config, "u is smaller than the counters needed for one key frame");
  }
  Keystream stream(config.secret_seed, config.period);
  auto raw = stream.raw_values(frame_counter(config, frame_index), n);
  return assemble_key_frame(raw, n, phi_effective, frame_index);
}

KeyFrameSequence::KeyFrameSequence(const SyncConfig& config, std::size_t n, double phi_effective)
    : stream_(config.secret_seed, config.period),
      config_(config),
      n_(n),
      phi_effective_(phi_effective),
      counter_(config.sc) {
  config_.validate();
}

KeyFrame KeyFrameSequence::next() {
  // Consume u counters per frame from where the previous frame stopped.
  auto raw = stream_.raw_values(counter_, config_.u * Keystream::kValuesPerCounter);
  counter_ = static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(counter_) + config_.u) % config_.period);
  return assemble_key_frame(raw, n_, phi_effective_, next_index_++);
}

std::uint64_t current_counter(const SyncConfig& config, double t_rx, double epsilon) {
  config.validate();
  const double elapsed = (t_rx + epsilon) - config.st;
  if (!(elapsed >= 0.0)) throw Error(ErrorKind::clock, "receive time precedes the stream start");
  // (t_rx + eps) - st rounds, so a time meant to land on a tick boundary can
  // come out a hair short of it. Snap within 1e-9 of a tick before flooring.
  const double exact = elapsed * config.g;
  const double nearest = std::round(exact);
  const double ticks = std::abs(exact - nearest) <= 1e-9 * std::max(1.0, nearest) ? nearest : std::floor(exact);
  if (ticks >= 0x1.0p64) throw Error(ErrorKind::clock, "elapsed time overflows the counter");
  return static_cast<std::uint64_t>(ticks) % config.period;
}

std::uint64_t initial_counter(std::uint64_t cc, std::uint64_t u) {
  if (u == 0) throw Error(ErrorKind::config, "u must be >= 1");
  return cc - cc % u;
}

}  // namespace vpsc
