#pragma once

#include <cstdint>
#include <string_view>

namespace kpt {

// 64-bit FNV-1a. Used for stream labels, fingerprints and config hashes.
constexpr uint64_t fnv1a(std::string_view s,
                         uint64_t h = 14695981039346656037ull) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

constexpr uint64_t fnv1a_u64(uint64_t v, uint64_t h = 14695981039346656037ull) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 1099511628211ull;
  }
  return h;
}

constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Labeled child-seed derivation. Children are independent of the order in
// which other labels are drawn, so adding a consumer never shifts the
// streams of existing ones.
constexpr uint64_t derive_seed(uint64_t base, std::string_view label) {
  return splitmix64(splitmix64(base) ^ fnv1a(label));
}

constexpr uint64_t derive_seed(uint64_t base, uint64_t index) {
  return splitmix64(splitmix64(base) ^ splitmix64(index + 0x165667b19e3779f9ull));
}

// xoshiro256** seeded through splitmix64. Self-contained on purpose:
// streams must be byte-identical across platforms, runs and worker counts,
// which rules out std::uniform_int_distribution and friends.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s_) {
      x = splitmix64(x);
      w = x;
    }
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Unbiased draw from [0, bound) by rejection. bound >= 1.
  uint32_t below(uint32_t bound) {
    const uint32_t threshold = static_cast<uint32_t>(-bound) % bound;
    for (;;) {
      const uint32_t r = static_cast<uint32_t>(next_u64());
      if (r >= threshold) return r % bound;
    }
  }

  bool coin() { return (next_u64() & 1) != 0; }

  double unit() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  uint64_t s_[4];
};

}  // namespace kpt
