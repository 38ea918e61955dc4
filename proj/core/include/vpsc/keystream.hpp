#pragma once

// Counter-mode keystream and the structured key frames drawn from it.
//
// The generator is AES-256 applied to explicit 128-bit big-endian counter
// blocks (CTR keystream), keyed by SHA-256(secret_seed). Each counter block
// yields kValuesPerCounter uniform values in [0, 1), so any value of the
// stream is reachable without generating its predecessors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vpsc {

/// Synchronization configuration (sc, st, g) plus counter period P and
/// counters consumed per key frame u.
struct SyncConfig {
  std::uint64_t sc = 0;
  double st = 0.0;
  double g = 1.0;
  std::uint64_t period = std::uint64_t{1} << 32;
  std::uint64_t u = 1;
  std::vector<std::uint8_t> secret_seed;

  /// Throws ErrorKind::config when an invariant does not hold.
  void validate() const;

  /// Desk-profile configuration: one key frame per N samples at f_s, with u
  /// derived from N and g = u * f_s / N.
  static SyncConfig for_frames(std::vector<std::uint8_t> seed, std::size_t n, double f_s,
                               double start_time = 0.0, std::uint64_t seed_counter = 0);
};

struct KeyFrame {
  std::vector<double> k_m;
  std::vector<double> k_a;
  std::uint64_t frame_index = 0;

  std::size_t size() const noexcept { return k_m.size(); }
};

std::vector<std::uint8_t> parse_hex(std::string_view hex);
std::string to_hex(std::span<const std::uint8_t> bytes);

class Keystream {
 public:
  static constexpr std::size_t kValuesPerCounter = 2;

  Keystream(std::span<const std::uint8_t> secret_seed, std::uint64_t period);

  /// `count` values starting at `counter`; blocks past the period wrap to 0.
  /// Throws ErrorKind::counter when counter >= period.
  std::vector<double> raw_values(std::uint64_t counter, std::size_t count) const;

  std::uint64_t period() const noexcept { return period_; }

 private:
  std::array<std::uint8_t, 32> key_{};
  std::uint64_t period_;
};

/// Counters needed for the N values (N/2 magnitudes, N/2 angles) of a frame.
std::uint64_t counters_per_frame(std::size_t n) noexcept;

/// Generator counter at which key frame `frame_index` begins: (sc + f*u) mod P.
std::uint64_t frame_counter(const SyncConfig& config, std::uint64_t frame_index);

/// Assembles a key frame from N raw values: magnitudes first, then angles.
KeyFrame assemble_key_frame(std::span<const double> raw, std::size_t n, double phi_effective,
                            std::uint64_t frame_index);

KeyFrame key_frame(const SyncConfig& config, std::uint64_t frame_index, std::size_t n,
                   double phi_effective);

/// Walks the stream front to back, pulling one key frame per call.
class KeyFrameSequence {
 public:
  KeyFrameSequence(const SyncConfig& config, std::size_t n, double phi_effective);
  KeyFrame next();

 private:
  Keystream stream_;
  SyncConfig config_;
  std::size_t n_;
  double phi_effective_;
  std::uint64_t counter_;
  std::uint64_t next_index_ = 0;
};

/// cc = floor(((t_rx + epsilon) - st) * g) mod P. Throws ErrorKind::clock when
/// the elapsed time is negative.
std::uint64_t current_counter(const SyncConfig& config, double t_rx, double epsilon);

/// Largest multiple of u that is <= cc.
std::uint64_t initial_counter(std::uint64_t cc, std::uint64_t u);

}  // namespace vpsc
