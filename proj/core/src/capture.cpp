#include "vpsc/capture.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "vpsc/errors.hpp"

namespace vpsc {
namespace {

constexpr std::array<char, 4> kMagic{'V', 'P', 'C', 'F'};

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_capture(const std::filesystem::path& path, const CaptureFile& capture) {
  std::vector<unsigned char> bytes(kMagic.begin(), kMagic.end());
  bytes.reserve(kCaptureHeaderBytes + 8 * capture.samples.size());
  put_le(bytes, kCaptureVersion);
  put_le(bytes, capture.n);
  put_le(bytes, std::uint32_t{0});
  put_le(bytes, capture.f_s);
  put_le(bytes, static_cast<std::uint64_t>(capture.samples.size()));
  for (double x : capture.samples) put_le(bytes, x);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "write to " + path.string() + " failed");
}

CaptureFile read_capture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open capture " + path.string());
  std::array<unsigned char, kCaptureHeaderBytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    throw Error(ErrorKind::io, "capture header is truncated");
  }
  if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(ErrorKind::io, "capture has a bad magic number");
  }
  if (get_le<std::uint32_t>(header.data() + 4) != kCaptureVersion) {
    throw Error(ErrorKind::io, "unsupported capture version");
  }
  CaptureFile capture;
  capture.n = get_le<std::uint32_t>(header.data() + 8);
  capture.f_s = get_le<double>(header.data() + 16);
  const auto count = get_le<std::uint64_t>(header.data() + 24);

  std::vector<unsigned char> body(count * 8);
  in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (in.gcount() != static_cast<std::streamsize>(body.size())) {
    throw Error(ErrorKind::io, "capture body is shorter than its sample count");
  }
  capture.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) capture.samples[i] = get_le<double>(body.data() + 8 * i);
  return capture;
}

}  // namespace vpsc
