#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pkgm {

using EntityId = uint32_t;
using RelationId = uint32_t;
using CategoryId = uint32_t;
using UserId = uint32_t;
using ItemId = uint32_t;

inline constexpr uint32_t kInvalidId = 0xffffffffu;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };
struct EmptyInputError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct SamplingError : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };
struct LookupError : Error { using Error::Error; };
struct CheckpointError : Error { using Error::Error; };
struct AdapterError : Error { using Error::Error; };
struct ProtocolError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct EvalError : Error { using Error::Error; };
struct SpecError : Error { using Error::Error; };

// FNV-1a, 64-bit. Used for config hashes and dataset fingerprints.
inline uint64_t fnv1a(const void* data, size_t n,
                      uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a(std::string_view s,
                      uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a(s.data(), s.size(), h);
}

std::string hex_u64(uint64_t v);

}  // namespace pkgm
