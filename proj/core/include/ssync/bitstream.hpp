#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ssync {

// Growable bit sequence. Bit i lives in word i/64 at position i%64 (LSB first).
// Bits at positions >= size() always read as zero.
class BitStream {
 public:
  static constexpr unsigned kWordBits = 64;

  BitStream() = default;

  static BitStream zeros(uint64_t n);
  static BitStream ones(uint64_t n);
  // Parses a string of '0'/'1' characters; other characters are skipped.
  static BitStream from_string(const std::string& s);

  uint64_t size() const noexcept { return len_; }
  bool empty() const noexcept { return len_ == 0; }
  const std::vector<uint64_t>& words() const noexcept { return words_; }
  // Direct word access; callers must keep bits at positions >= size() zero.
  std::vector<uint64_t>& raw_words() noexcept { return words_; }

  void append_bits(uint64_t value, unsigned count);
  uint64_t read_bits(uint64_t start, unsigned count) const;
  void append_stream(const BitStream& src);
  // Appends src[from..to).
  void append_range(const BitStream& src, uint64_t from, uint64_t to);
  void append_bit(bool b) { append_bits(b ? 1u : 0u, 1); }
  void append_repeated(bool b, uint64_t count);

  bool get(uint64_t i) const noexcept {
    return i < len_ && ((words_[i >> 6] >> (i & 63)) & 1u);
  }
  void set(uint64_t i, bool b = true);
  void resize(uint64_t n);
  void clear() noexcept {
    words_.clear();
    len_ = 0;
  }
  void reserve_bits(uint64_t n) { words_.reserve((n + 63) / 64); }

  uint64_t popcount() const noexcept;
  std::string to_string() const;

  bool operator==(const BitStream& o) const noexcept {
    return len_ == o.len_ && words_ == o.words_;
  }
  bool operator!=(const BitStream& o) const noexcept { return !(*this == o); }

 private:
  void grow_to(uint64_t bits);

  std::vector<uint64_t> words_;
  uint64_t len_ = 0;
};

// Word-parallel bitmask helpers. Results have the length stated per function.
BitStream bit_and(const BitStream& a, const BitStream& b);  // min length
BitStream bit_or(const BitStream& a, const BitStream& b);   // max length
BitStream bit_not(const BitStream& a);                      // same length
// out[i] = a[i + d] for i in [0..n); positions past a.size() take `fill`.
BitStream shift_down(const BitStream& a, uint64_t d, uint64_t n, bool fill);
// out[i] = a[i - d] for i in [d..n), out[i] = fill for i < d.
BitStream shift_up(const BitStream& a, uint64_t d, uint64_t n, bool fill);
// Copy truncated or extended (with `fill`) to exactly n bits.
BitStream fit(const BitStream& a, uint64_t n, bool fill);

// Container: "SSB1", decoded length (u64 LE), bit count (u64 LE), payload.
struct Container {
  uint64_t decoded_len = 0;
  BitStream bits;
};

void write_container(std::ostream& os, const Container& c);
Container read_container(std::istream& is);

}  // namespace ssync
