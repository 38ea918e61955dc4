#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <doctest.h>

#include "vpsc/errors.hpp"

#define CHECK_VPSC_ERROR(expr, expected_kind)                       \
  do {                                                              \
    bool thrown_ = false;                                           \
    try {                                                           \
      (void)(expr);                                                 \
    } catch (const vpsc::Error& e_) {                               \
      thrown_ = true;                                               \
      CHECK_EQ(vpsc::to_string(e_.kind()), vpsc::to_string(expected_kind)); \
    }                                                               \
    CHECK_MESSAGE(thrown_, "expected a vpsc::Error from " #expr);   \
  } while (0)

namespace testing {

inline std::vector<double> uniform_samples(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

inline std::vector<std::uint8_t> seed_bytes(std::uint8_t tag) {
  std::vector<std::uint8_t> s(16);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::uint8_t>(i + tag);
  return s;
}

}  // namespace testing
