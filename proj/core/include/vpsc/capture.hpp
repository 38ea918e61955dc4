#pragma once

// Raw capture files for sync trials. Layout, all little-endian:
//
//   offset  size  field
//   0       4     magic "VPCF"
//   4       4     version (u32, 1)
//   8       4     frame length N (u32)
//   12      4     reserved (u32, 0)
//   16      8     f_s (f64)
//   24      8     sample count (u64)
//   32      8*k   samples (f64)

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vpsc {

inline constexpr std::uint32_t kCaptureVersion = 1;
inline constexpr std::size_t kCaptureHeaderBytes = 32;

struct CaptureFile {
  std::uint32_t n = 256;
  double f_s = 64000.0;
  std::vector<double> samples;
};

/// Throws ErrorKind::io on any read/write failure or malformed header.
void write_capture(const std::filesystem::path& path, const CaptureFile& capture);
CaptureFile read_capture(const std::filesystem::path& path);

}  // namespace vpsc
