#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "ssync/bitstream.hpp"
#include "ssync/mathutil.hpp"

namespace ssync {

// Largest value accepted as a literal.
inline constexpr uint64_t kMaxLiteral = uint64_t{1} << 62;
inline constexpr uint64_t kDefaultTableN = uint64_t{1} << 16;

// Elias-gamma: 0^floor(lg x) followed by the binary form of x, most significant bit first.
BitStream gamma_encode(uint64_t x);
void gamma_append(BitStream& out, uint64_t x);

struct GammaResult {
  uint64_t value;
  uint64_t bits;
};
GammaResult gamma_decode(const BitStream& s, uint64_t offset);

struct SparseEncoding {
  BitStream stream;
  uint64_t decoded_len = 0;

  bool operator==(const SparseEncoding& o) const {
    return decoded_len == o.decoded_len && stream == o.stream;
  }
};

// One token of a sparse encoding: a literal 1.gamma(u) or a zero-run 0.gamma(x).
struct Token {
  bool literal;
  uint64_t value;
  uint64_t bits;
};
Token read_token(const BitStream& s, uint64_t offset);

// Bits of a token carrying value (literal u or zero-run length x), value >= 1.
inline uint64_t token_size(uint64_t value) { return 2 * uint64_t{floor_lg(value)} + 2; }
inline uint64_t gamma_size(uint64_t x) { return 2 * uint64_t{floor_lg(x)} + 1; }

SparseEncoding senc_encode(std::span<const uint64_t> a);
std::vector<uint64_t> senc_decode(const SparseEncoding& e);
uint64_t senc_size(std::span<const uint64_t> a);

// Builds an encoding token by token. Consecutive zeros are merged into a
// single zero-run token regardless of how they were appended.
class SencWriter {
 public:
  void append_zeros(uint64_t count) {
    pending_ += count;
    len_ += count;
  }
  void append_literal(uint64_t u);
  void append_value(uint64_t v) {
    if (v == 0)
      append_zeros(1);
    else
      append_literal(v);
  }
  // Appends lead zeros, then src[from..to) which must be a token sequence
  // that starts and ends with a literal token and decodes to mid_len symbols,
  // then trail zeros.
  void append_piece(uint64_t lead, const BitStream& src, uint64_t from, uint64_t to,
                    uint64_t mid_len, uint64_t trail);
  // Appends a full encoding, merging zero-runs across the seam.
  void append_encoding(const SparseEncoding& e);
  uint64_t decoded_len() const noexcept { return len_; }
  uint64_t pending_zeros() const noexcept { return pending_; }
  SparseEncoding finish();

 private:
  void flush();

  BitStream out_;
  uint64_t pending_ = 0;
  uint64_t len_ = 0;
};

SparseEncoding senc_from_list(uint64_t n, std::span<const std::pair<uint64_t, uint64_t>> pairs);
SparseEncoding senc_from_positions(uint64_t n, std::span<const uint64_t> positions);
std::vector<std::pair<uint64_t, uint64_t>> senc_to_list(const SparseEncoding& e);
std::vector<uint64_t> senc_to_positions(const SparseEncoding& e);

// Returns the encoding of A[0..keep) . 0^(n-keep).
SparseEncoding senc_truncate_zero_tail(const SparseEncoding& e, uint64_t keep);

// Does the linear work up front; emit() only copies out the prepared stream.
class DeferredEncoder {
 public:
  explicit DeferredEncoder(std::span<const uint64_t> a);
  SparseEncoding emit() const;

 private:
  BitStream prepared_;
  uint64_t len_;
};

struct ParseToken {
  bool literal;
  uint32_t start;      // bit offset of the token in the window
  uint32_t end;        // bit offset just past the token
  uint64_t value;      // literal value or zero-run length
  uint64_t a_before;   // decoded symbols preceding this token
};

struct ParseInfo {
  uint32_t b = 0;
  uint64_t a = 0;
  uint64_t a_plus = 0;
  uint64_t max_val = 0;
  uint32_t ntok = 0;
  std::array<ParseToken, 32> tok{};

  uint64_t literal_start_mask() const;
  std::vector<uint64_t> nonzero_positions() const;
  // Number of non-zero symbols in A[0..j).
  uint64_t rank(uint64_t j) const;
  // Position of the j-th non-zero symbol, j in [1..a_plus].
  uint64_t select(uint64_t j) const;
  std::vector<uint64_t> decode() const;
};

// Longest-valid-prefix table over k-bit windows with k = min(ceil(lg N), 16).
class ParseTable {
 public:
  explicit ParseTable(uint64_t table_n = kDefaultTableN);
  // One immutable table per table_n, built on first use.
  static std::shared_ptr<const ParseTable> shared(uint64_t table_n = kDefaultTableN);

  unsigned window_bits() const noexcept { return k_; }
  unsigned max_ell() const noexcept { return max_ell_; }
  // Largest b <= min(ell, |s| - offset) such that s[offset..offset+b) is a
  // sparse encoding, plus the statistics of the decoded prefix.
  ParseInfo parse(const BitStream& s, uint64_t offset, unsigned ell) const;

 private:
  struct Packed {
    uint8_t end;
    uint8_t literal;
    uint16_t value;
    uint16_t a_before;
  };
  ParseInfo parse_slow(const BitStream& s, uint64_t offset, unsigned ell) const;

  unsigned k_;
  unsigned max_ell_;
  unsigned per_entry_;
  std::vector<uint8_t> count_;
  std::vector<Packed> tokens_;
};

}  // namespace ssync
