#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace kpt {

// A string over {0,1} of known length, at most 31 bits. Bit i is the
// coefficient of 2^i; the msb is bit len-1. Unused high bits stay zero so
// value comparison doubles as lexicographic comparison at fixed length.
struct BitString {
  uint32_t word = 0;
  uint8_t len = 0;

  static BitString make(uint32_t value, int length) {
    BitString b;
    b.len = static_cast<uint8_t>(length);
    b.word = length >= 32 ? value : (value & ((1u << length) - 1u));
    return b;
  }

  bool bit(int i) const { return ((word >> i) & 1u) != 0; }
  bool msb() const { return len > 0 && bit(len - 1); }
  bool parity() const { return (std::popcount(word) & 1) != 0; }
  uint32_t value() const { return word; }

  friend auto operator<=>(const BitString&, const BitString&) = default;

  // Zero-padded lowercase hex, ceil(len/4) digits.
  std::string hex() const {
    const int digits = (len + 3) / 4;
    std::string out(static_cast<size_t>(digits), '0');
    static const char* kHex = "0123456789abcdef";
    for (int d = 0; d < digits; ++d) {
      out[digits - 1 - d] = kHex[(word >> (4 * d)) & 0xf];
    }
    return out;
  }

  static std::optional<BitString> from_hex(std::string_view s, int length) {
    if (s.size() != static_cast<size_t>((length + 3) / 4)) return std::nullopt;
    uint32_t v = 0;
    for (char c : s) {
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else return std::nullopt;
      v = (v << 4) | static_cast<uint32_t>(d);
    }
    if (length < 32 && v >= (1u << length)) return std::nullopt;
    return make(v, length);
  }
};

using Witness = BitString;

}  // namespace kpt
