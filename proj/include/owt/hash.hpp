// FNV-1a 64-bit: the fixed, platform-independent hash behind store
// partitioning, manifest checksums and config hashes.
#pragma once

#include <cstdint>
#include <string_view>

namespace owt {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = kFnvOffset) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

// Streaming form, resumable across appends: hashing a file's bytes in any
// chunking yields the same value.
class FnvHasher {
 public:
  FnvHasher() = default;
  explicit FnvHasher(std::uint64_t state) : state_(state) {}

  void update(std::string_view bytes) { state_ = fnv1a64(bytes, state_); }
  void update(const void* data, std::size_t n) {
    update(std::string_view(static_cast<const char*>(data), n));
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = kFnvOffset;
};

}  // namespace owt
