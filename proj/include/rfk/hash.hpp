#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <string>

namespace rfk {

// FNV-1a 64-bit; fine for short inputs, inherently one multiply per byte.
inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

// Content fingerprint for large buffers (raster manifests): four
// independent FNV-style lanes over 8-byte words, folded with the length.
// Stable across platforms; not FNV-1a and not cryptographic.
inline std::uint64_t content_hash64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t lanes[4] = {0xcbf29ce484222325ull, 0x9e3779b97f4a7c15ull,
                            0xc2b2ae3d27d4eb4full, 0x165667b19e3779f9ull};
  constexpr std::uint64_t kMul = 0x100000001b3ull;
  std::size_t i = 0;
  for (; i + 32 <= size; i += 32) {
    for (int lane = 0; lane < 4; ++lane) {
      std::uint64_t word;
      std::memcpy(&word, bytes + i + 8 * static_cast<std::size_t>(lane), 8);
      lanes[lane] = (lanes[lane] ^ word) * kMul;
    }
  }
  std::uint64_t h = lanes[0];
  for (int lane = 1; lane < 4; ++lane) {
    h = (h ^ (lanes[lane] + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2))) * kMul;
  }
  for (; i < size; ++i) h = (h ^ bytes[i]) * kMul;
  h ^= static_cast<std::uint64_t>(size);
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

inline std::string to_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

}  // namespace rfk
