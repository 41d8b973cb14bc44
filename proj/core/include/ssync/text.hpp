#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ssync/bitstream.hpp"
#include "ssync/sparsecodec.hpp"

namespace ssync {

// Table index of a short string: packed content in the upper 32 bits (first
// symbol lowest), length in the lower 32 bits.
struct IntCode {
  uint64_t value = 0;

  uint64_t content() const noexcept { return value >> 32; }
  uint32_t length() const noexcept { return static_cast<uint32_t>(value); }
  bool operator==(const IntCode& o) const noexcept { return value == o.value; }
};

inline IntCode make_int_code(uint64_t content, uint32_t len) {
  return IntCode{(content << 32) | len};
}

// T over an alphabet of size sigma (a power of two) whose largest symbol is
// reserved as the sentinel $, stored as $^n . T . $^n in lg(sigma)-bit form.
class PackedText {
 public:
  PackedText() = default;
  static PackedText from_symbols(std::span<const uint32_t> raw, uint64_t sigma_in);
  static PackedText from_string(std::string_view s);

  uint64_t n() const noexcept { return n_; }
  uint64_t sigma() const noexcept { return sigma_; }
  uint64_t sigma_in() const noexcept { return sigma_in_; }
  unsigned bits_per_symbol() const noexcept { return bps_; }
  uint32_t sentinel() const noexcept { return static_cast<uint32_t>(sigma_ - 1); }
  const BitStream& payload() const noexcept { return payload_; }
  const std::vector<uint32_t>& symbols() const noexcept { return sym_; }

  // Symbol at logical index i; every index outside [0..n) reads as $.
  uint32_t at(int64_t i) const noexcept {
    return i >= 0 && static_cast<uint64_t>(i) < n_ ? sym_[static_cast<size_t>(i)] : sentinel();
  }
  // Packed T[i..i+len), first symbol in the low bits.
  uint64_t extract(int64_t i, unsigned len) const;
  // Longest string accepted by int_code.
  unsigned int_code_limit() const noexcept { return 32 / bps_; }
  IntCode int_code(int64_t i, unsigned len) const;
  // $^m . T . $^m in packed form.
  BitStream padded(uint64_t m) const;

 private:
  uint64_t n_ = 0;
  uint64_t sigma_ = 2;
  uint64_t sigma_in_ = 1;
  unsigned bps_ = 1;
  BitStream payload_;
  std::vector<uint32_t> sym_;
};

// Occurrence counts of all strings of length <= max_len in a packed sequence,
// built from counts of the 2*max_len-blocks at multiples of max_len.
class SubstringCounter {
 public:
  SubstringCounter(const BitStream& packed, uint64_t count, unsigned bps, unsigned max_len,
                   uint64_t table_n = kDefaultTableN);

  static unsigned default_max_len(unsigned bps, uint64_t table_n);
  unsigned max_len() const noexcept { return b_; }
  // Occurrences of the string with the given packed content and length.
  uint64_t count(uint64_t content, unsigned len) const;
  uint64_t count(std::span<const uint32_t> s) const;

 private:
  uint64_t key(uint64_t content, unsigned len) const { return (uint64_t{len} << 56) | content; }

  uint64_t total_;
  unsigned bps_;
  unsigned b_;
  bool direct_;
  std::vector<uint64_t> table_;
  std::unordered_map<uint64_t, uint64_t> map_;
};

SubstringCounter build_substring_counter(const PackedText& t, uint64_t table_n = kDefaultTableN);

}  // namespace ssync
