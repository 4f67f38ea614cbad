#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace gdag {

// FNV-1a over raw bytes; used for dataset fingerprints in score caches and
// input fingerprints in CLI reports.
inline std::uint64_t fnv1a(const void* bytes, std::size_t size,
                           std::uint64_t seed = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s) {
  return fnv1a(s.data(), s.size());
}

}  // namespace gdag
