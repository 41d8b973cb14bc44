#include "ssync/bitstream.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "ssync/errors.hpp"

namespace ssync {

namespace {

inline uint64_t low_mask(unsigned count) {
  return count >= 64 ? ~uint64_t{0} : ((uint64_t{1} << count) - 1);
}

}  // namespace

BitStream BitStream::zeros(uint64_t n) {
  BitStream s;
  s.resize(n);
  return s;
}

BitStream BitStream::ones(uint64_t n) {
  BitStream s;
  s.append_repeated(true, n);
  return s;
}

BitStream BitStream::from_string(const std::string& str) {
  BitStream s;
  for (char c : str) {
    if (c == '0' || c == '1') s.append_bit(c == '1');
  }
  return s;
}

void BitStream::grow_to(uint64_t bits) {
  uint64_t need = (bits + 63) / 64;
  if (need > words_.size()) {
    if (need > words_.capacity()) {
      words_.reserve(std::max<uint64_t>(need, words_.capacity() * 2));
    }
    words_.resize(need, 0);
  }
}

void BitStream::append_bits(uint64_t value, unsigned count) {
  if (count > kWordBits) throw std::invalid_argument("append_bits: count exceeds word width");
  if (count == 0) return;
  value &= low_mask(count);
  grow_to(len_ + count);
  unsigned off = len_ & 63;
  uint64_t w = len_ >> 6;
  words_[w] |= value << off;
  if (off + count > 64) words_[w + 1] |= value >> (64 - off);
  len_ += count;
}

uint64_t BitStream::read_bits(uint64_t start, unsigned count) const {
  if (count > kWordBits) throw std::invalid_argument("read_bits: count exceeds word width");
  if (count == 0 || start >= len_) return 0;
  uint64_t w = start >> 6;
  unsigned off = start & 63;
  uint64_t v = words_[w] >> off;
  if (off != 0 && w + 1 < words_.size()) v |= words_[w + 1] << (64 - off);
  return v & low_mask(count);
}

void BitStream::append_stream(const BitStream& src) { append_range(src, 0, src.len_); }

void BitStream::append_range(const BitStream& src, uint64_t from, uint64_t to) {
  if (to > src.len_) to = src.len_;
  if (from >= to) return;
  uint64_t count = to - from;
  grow_to(len_ + count);
  if ((len_ & 63) == 0 && (from & 63) == 0) {
    uint64_t full = count >> 6;
    std::copy_n(src.words_.begin() + static_cast<std::ptrdiff_t>(from >> 6), full,
                words_.begin() + static_cast<std::ptrdiff_t>(len_ >> 6));
    len_ += full << 6;
    from += full << 6;
    count -= full << 6;
    if (count) append_bits(src.read_bits(from, static_cast<unsigned>(count)),
                           static_cast<unsigned>(count));
    return;
  }
  while (count >= 64) {
    append_bits(src.read_bits(from, 64), 64);
    from += 64;
    count -= 64;
  }
  if (count) append_bits(src.read_bits(from, static_cast<unsigned>(count)),
                         static_cast<unsigned>(count));
}

void BitStream::append_repeated(bool b, uint64_t count) {
  if (!b) {
    resize(len_ + count);
    return;
  }
  while (count >= 64) {
    append_bits(~uint64_t{0}, 64);
    count -= 64;
  }
  if (count) append_bits(low_mask(static_cast<unsigned>(count)), static_cast<unsigned>(count));
}

void BitStream::set(uint64_t i, bool b) {
  if (i >= len_) throw std::out_of_range("BitStream::set: index past end");
  uint64_t m = uint64_t{1} << (i & 63);
  if (b)
    words_[i >> 6] |= m;
  else
    words_[i >> 6] &= ~m;
}

void BitStream::resize(uint64_t n) {
  if (n < len_) {
    words_.resize((n + 63) / 64);
    if (n & 63) words_.back() &= low_mask(n & 63);
    len_ = n;
    return;
  }
  grow_to(n);
  len_ = n;
}

uint64_t BitStream::popcount() const noexcept {
  uint64_t c = 0;
  for (uint64_t w : words_) c += static_cast<uint64_t>(std::popcount(w));
  return c;
}

std::string BitStream::to_string() const {
  std::string s;
  s.reserve(len_);
  for (uint64_t i = 0; i < len_; ++i) s.push_back(get(i) ? '1' : '0');
  return s;
}

BitStream bit_and(const BitStream& a, const BitStream& b) {
  uint64_t n = std::min(a.size(), b.size());
  BitStream out = fit(a, n, false);
  auto& w = out.raw_words();
  for (size_t i = 0; i < w.size(); ++i) w[i] &= b.words()[i];
  return out;
}

BitStream bit_or(const BitStream& a, const BitStream& b) {
  const BitStream& big = a.size() >= b.size() ? a : b;
  const BitStream& small = a.size() >= b.size() ? b : a;
  BitStream out = big;
  auto& w = out.raw_words();
  for (size_t i = 0; i < small.words().size(); ++i) w[i] |= small.words()[i];
  return out;
}

BitStream bit_not(const BitStream& a) {
  BitStream out = a;
  auto& w = out.raw_words();
  for (auto& x : w) x = ~x;
  if (a.size() & 63) w.back() &= low_mask(a.size() & 63);
  return out;
}

BitStream fit(const BitStream& a, uint64_t n, bool fill) {
  if (n <= a.size()) {
    BitStream out = a;
    out.resize(n);
    return out;
  }
  BitStream out = a;
  out.append_repeated(fill, n - a.size());
  return out;
}

BitStream shift_down(const BitStream& a, uint64_t d, uint64_t n, bool fill) {
  BitStream out;
  out.reserve_bits(n);
  if (d < a.size()) out.append_range(a, d, std::min(a.size(), d + n));
  if (out.size() < n) out.append_repeated(fill, n - out.size());
  return out;
}

BitStream shift_up(const BitStream& a, uint64_t d, uint64_t n, bool fill) {
  BitStream out;
  out.reserve_bits(n);
  out.append_repeated(fill, std::min(d, n));
  if (out.size() < n) out.append_range(a, 0, n - out.size());
  if (out.size() < n) out.append_repeated(fill, n - out.size());
  return out;
}

namespace {

void put_u64(std::ostream& os, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw FormatError("container truncated");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t{b[i]} << (8 * i);
  return v;
}

}  // namespace

void write_container(std::ostream& os, const Container& c) {
  os.write("SSB1", 4);
  put_u64(os, c.decoded_len);
  put_u64(os, c.bits.size());
  uint64_t nbytes = (c.bits.size() + 7) / 8;
  std::string payload(nbytes, '\0');
  for (uint64_t i = 0; i < nbytes; ++i) {
    payload[i] = static_cast<char>(c.bits.read_bits(i * 8, 8));
  }
  os.write(payload.data(), static_cast<std::streamsize>(nbytes));
}

Container read_container(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "SSB1") throw FormatError("bad magic");
  Container c;
  c.decoded_len = get_u64(is);
  uint64_t nbits = get_u64(is);
  uint64_t nbytes = (nbits + 7) / 8;
  std::string payload(nbytes, '\0');
  if (nbytes && !is.read(payload.data(), static_cast<std::streamsize>(nbytes)))
    throw FormatError("container payload truncated");
  c.bits.reserve_bits(nbits);
  for (uint64_t i = 0; i < nbytes; ++i) {
    unsigned take = static_cast<unsigned>(std::min<uint64_t>(8, nbits - i * 8));
    c.bits.append_bits(static_cast<unsigned char>(payload[i]), take);
  }
  if (nbytes && (static_cast<unsigned char>(payload[nbytes - 1]) >> (nbits - (nbytes - 1) * 8)) != 0 &&
      nbits % 8 != 0)
    throw FormatError("nonzero padding bits");
  return c;
}

}  // namespace ssync
