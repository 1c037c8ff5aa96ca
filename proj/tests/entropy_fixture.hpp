#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "meshpress/entropy.hpp"

namespace meshpress::testing {

/// 64-bit LCG (Knuth's MMIX constants); fully specified, unlike the
/// standard distributions.
struct Lcg {
  std::uint64_t state;
  std::uint32_t next() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<std::uint32_t>(state >> 33);
  }
};

inline std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline constexpr std::size_t kFixtureSymbols = 100'000;

/// Skewed symbols over four alphabets, signed values and raw bit runs,
/// interleaved. Deterministic on every platform.
inline std::vector<std::uint8_t> encode_fixture() {
  Lcg rng{2024};
  RangeEncoder enc;
  AdaptiveModel small(2), mid(7), wide(64), big(1000);
  SignedEscapeCoder coeff(12);
  for (std::size_t i = 0; i < kFixtureSymbols; ++i) {
    const std::uint32_t r = rng.next();
    switch (i % 5) {
      case 0:
        enc.encode(small, (r & 7) == 0 ? 1 : 0);
        break;
      case 1:
        enc.encode(mid, (r % 7) * (r % 7) % 7);
        break;
      case 2:
        enc.encode(wide, (r % 64) * (r % 64) / 64);
        break;
      case 3:
        enc.encode(big, r % 1000 < 500 ? r % 10 : r % 1000);
        break;
      default:
        if (r & 1) {
          coeff.encode(enc, static_cast<std::int64_t>(r % 41) - 20 + ((r & 0x300) == 0x300 ? 3000 : 0));
        } else {
          const int n = 1 + static_cast<int>(r % 24);
          enc.encode_bits((r >> 8) & ((1u << n) - 1), n);
        }
    }
  }
  return enc.finish();
}

/// Golden hash of `encode_fixture()`.
inline constexpr std::uint64_t kFixtureHash = 0x35bd012b747445e7ull;
inline constexpr std::size_t kFixtureBytes = 65315;

}  // namespace meshpress::testing
