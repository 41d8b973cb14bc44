#include "ssync/text.hpp"

#include <stdexcept>
#include <string>

#include "ssync/errors.hpp"
#include "ssync/mathutil.hpp"

namespace ssync {

PackedText PackedText::from_symbols(std::span<const uint32_t> raw, uint64_t sigma_in) {
  if (sigma_in < 1) throw std::invalid_argument("alphabet size must be positive");
  PackedText t;
  t.n_ = raw.size();
  t.sigma_in_ = sigma_in;
  t.bps_ = ceil_lg(sigma_in + 1);
  if (t.bps_ == 0) t.bps_ = 1;
  if (t.bps_ > 32) throw std::invalid_argument("alphabet too large");
  t.sigma_ = uint64_t{1} << t.bps_;
  t.sym_.assign(raw.begin(), raw.end());
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] >= sigma_in)
      throw InvalidInput("symbol " + std::to_string(raw[i]) + " at position " + std::to_string(i) +
                         " outside alphabet of size " + std::to_string(sigma_in));
  }
  uint32_t dollar = t.sentinel();
  t.payload_.reserve_bits(3 * t.n_ * t.bps_);
  for (uint64_t i = 0; i < t.n_; ++i) t.payload_.append_bits(dollar, t.bps_);
  for (uint32_t c : raw) t.payload_.append_bits(c, t.bps_);
  for (uint64_t i = 0; i < t.n_; ++i) t.payload_.append_bits(dollar, t.bps_);
  return t;
}

PackedText PackedText::from_string(std::string_view s) {
  std::vector<uint32_t> raw(s.begin(), s.end());
  for (auto& c : raw) c &= 0xffu;
  return from_symbols(raw, 256);
}

uint64_t PackedText::extract(int64_t i, unsigned len) const {
  if (uint64_t{len} * bps_ > 64) throw std::invalid_argument("extract: width exceeds a word");
  int64_t n = static_cast<int64_t>(n_);
  if (i >= -n && i + static_cast<int64_t>(len) <= 2 * n) {
    return payload_.read_bits(static_cast<uint64_t>(i + n) * bps_, len * bps_);
  }
  uint64_t v = 0;
  for (unsigned j = 0; j < len; ++j) v |= uint64_t{at(i + j)} << (j * bps_);
  return v;
}

IntCode PackedText::int_code(int64_t i, unsigned len) const {
  if (len > int_code_limit()) throw std::invalid_argument("int_code: string too long");
  if (len == 0) return IntCode{0};
  return make_int_code(extract(i, len), len);
}

BitStream PackedText::padded(uint64_t m) const {
  BitStream out;
  out.reserve_bits((n_ + 2 * m) * bps_);
  uint32_t dollar = sentinel();
  for (uint64_t i = 0; i < m; ++i) out.append_bits(dollar, bps_);
  out.append_range(payload_, n_ * bps_, 2 * n_ * bps_);
  for (uint64_t i = 0; i < m; ++i) out.append_bits(dollar, bps_);
  return out;
}

unsigned SubstringCounter::default_max_len(unsigned bps, uint64_t table_n) {
  unsigned v = ceil_lg(table_n) / (8 * bps);
  return v == 0 ? 1 : v;
}

SubstringCounter::SubstringCounter(const BitStream& packed, uint64_t count, unsigned bps,
                                   unsigned max_len, uint64_t table_n)
    : total_(count), bps_(bps), b_(max_len == 0 ? 1 : max_len) {
  if (uint64_t{2} * b_ * bps_ > 56) throw std::invalid_argument("substring counter: blocks exceed a word");
  std::unordered_map<uint64_t, uint64_t> blocks;
  for (uint64_t start = 0; start < count; start += b_) {
    unsigned len = static_cast<unsigned>(std::min<uint64_t>(count, start + 2 * b_) - start);
    uint64_t content = packed.read_bits(start * bps_, len * bps_);
    ++blocks[key(content, len)];
  }
  uint64_t span = uint64_t{1} << (b_ * bps_);
  direct_ = (b_ * bps_ < 40) && (uint64_t{b_} + 1) * span <= table_n;
  if (direct_) table_.assign((b_ + 1) * span, 0);
  for (auto [k, s] : blocks) {
    unsigned len = static_cast<unsigned>(k >> 56);
    uint64_t content = k & low_bits(56);
    for (unsigned x = 0; x < b_ && x < len; ++x) {
      for (unsigned l = 1; l <= b_ && x + l <= len; ++l) {
        uint64_t sub = (content >> (x * bps_)) & low_bits(l * bps_);
        if (direct_)
          table_[l * span + sub] += s;
        else
          map_[key(sub, l)] += s;
      }
    }
  }
}

uint64_t SubstringCounter::count(uint64_t content, unsigned len) const {
  if (len > b_) throw std::invalid_argument("substring counter: query longer than limit");
  if (len == 0) return total_ + 1;
  if (direct_) return table_[len * (uint64_t{1} << (b_ * bps_)) + content];
  auto it = map_.find(key(content, len));
  return it == map_.end() ? 0 : it->second;
}

uint64_t SubstringCounter::count(std::span<const uint32_t> s) const {
  if (s.size() > b_) throw std::invalid_argument("substring counter: query longer than limit");
  uint64_t content = 0;
  for (size_t j = 0; j < s.size(); ++j) {
    if (s[j] >> bps_) return 0;
    content |= uint64_t{s[j]} << (j * bps_);
  }
  return count(content, static_cast<unsigned>(s.size()));
}

SubstringCounter build_substring_counter(const PackedText& t, uint64_t table_n) {
  unsigned b = SubstringCounter::default_max_len(t.bits_per_symbol(), table_n);
  BitStream body;
  body.append_range(t.payload(), t.n() * t.bits_per_symbol(), 2 * t.n() * t.bits_per_symbol());
  return SubstringCounter(body, t.n(), t.bits_per_symbol(), b, table_n);
}

}  // namespace ssync
