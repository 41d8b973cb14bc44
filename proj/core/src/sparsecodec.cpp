#include "ssync/sparsecodec.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <stdexcept>

#include "ssync/errors.hpp"

namespace ssync {

void gamma_append(BitStream& out, uint64_t x) {
  if (x == 0) throw std::invalid_argument("gamma code of zero");
  unsigned z = floor_lg(x);
  out.append_repeated(false, z);
  out.append_bits(reverse_low(x, z + 1), z + 1);
}

BitStream gamma_encode(uint64_t x) {
  BitStream b;
  gamma_append(b, x);
  return b;
}

GammaResult gamma_decode(const BitStream& s, uint64_t offset) {
  uint64_t pos = offset;
  uint64_t z = 0;
  for (;;) {
    if (pos >= s.size()) throw DecodeError("truncated gamma code", offset);
    uint64_t avail = std::min<uint64_t>(64, s.size() - pos);
    uint64_t w = s.read_bits(pos, static_cast<unsigned>(avail));
    if (w == 0) {
      z += avail;
      pos += avail;
      if (z > 62) throw DecodeError("gamma code too long", offset);
      continue;
    }
    z += static_cast<uint64_t>(std::countr_zero(w));
    break;
  }
  if (z > 62) throw DecodeError("gamma code too long", offset);
  if (offset + 2 * z + 1 > s.size()) throw DecodeError("truncated gamma code", offset);
  unsigned width = static_cast<unsigned>(z + 1);
  uint64_t v = reverse_low(s.read_bits(offset + z, width), width);
  return {v, 2 * z + 1};
}

Token read_token(const BitStream& s, uint64_t offset) {
  if (offset >= s.size()) throw DecodeError("missing token", offset);
  bool lit = s.get(offset);
  GammaResult g = gamma_decode(s, offset + 1);
  return {lit, g.value, g.bits + 1};
}

void SencWriter::flush() {
  if (pending_ == 0) return;
  out_.append_bit(false);
  gamma_append(out_, pending_);
  pending_ = 0;
}

void SencWriter::append_literal(uint64_t u) {
  if (u == 0 || u > kMaxLiteral) throw std::invalid_argument("literal out of range");
  flush();
  out_.append_bit(true);
  gamma_append(out_, u);
  ++len_;
}

void SencWriter::append_piece(uint64_t lead, const BitStream& src, uint64_t from, uint64_t to,
                              uint64_t mid_len, uint64_t trail) {
  append_zeros(lead);
  if (from < to) {
    flush();
    out_.append_range(src, from, to);
    len_ += mid_len;
  }
  append_zeros(trail);
}

void SencWriter::append_encoding(const SparseEncoding& e) {
  const BitStream& s = e.stream;
  uint64_t pos = 0;
  uint64_t first_lit = s.size();
  uint64_t last_lit_end = 0;
  uint64_t lead = 0, trail = 0, mid = 0;
  bool seen_lit = false;
  while (pos < s.size()) {
    Token t = read_token(s, pos);
    if (t.literal) {
      if (!seen_lit) first_lit = pos;
      seen_lit = true;
      mid += trail + 1;
      trail = 0;
      last_lit_end = pos + t.bits;
    } else if (!seen_lit) {
      lead += t.value;
    } else {
      trail += t.value;
    }
    pos += t.bits;
  }
  if (!seen_lit) {
    append_zeros(lead);
    return;
  }
  append_piece(lead, s, first_lit, last_lit_end, mid, trail);
}

SparseEncoding SencWriter::finish() {
  flush();
  SparseEncoding e{std::move(out_), len_};
  out_ = BitStream();
  len_ = 0;
  return e;
}

SparseEncoding senc_encode(std::span<const uint64_t> a) {
  SencWriter w;
  for (uint64_t v : a) w.append_value(v);
  return w.finish();
}

std::vector<uint64_t> senc_decode(const SparseEncoding& e) {
  std::vector<uint64_t> out;
  out.reserve(e.decoded_len);
  const BitStream& s = e.stream;
  uint64_t pos = 0;
  bool prev_zero = false;
  while (pos < s.size()) {
    Token t = read_token(s, pos);
    if (t.literal) {
      out.push_back(t.value);
    } else {
      if (prev_zero) throw DecodeError("consecutive zero-run tokens", pos);
      if (out.size() + t.value > e.decoded_len) throw DecodeError("encoding longer than declared", pos);
      out.resize(out.size() + t.value, 0);
    }
    if (out.size() > e.decoded_len) throw DecodeError("encoding longer than declared", pos);
    prev_zero = !t.literal;
    pos += t.bits;
  }
  if (out.size() != e.decoded_len) throw DecodeError("encoding shorter than declared", pos);
  return out;
}

uint64_t senc_size(std::span<const uint64_t> a) {
  uint64_t bits = 0;
  uint64_t run = 0;
  for (uint64_t v : a) {
    if (v == 0) {
      ++run;
      continue;
    }
    if (run) bits += token_size(run);
    run = 0;
    bits += token_size(v);
  }
  if (run) bits += token_size(run);
  return bits;
}

SparseEncoding senc_from_list(uint64_t n, std::span<const std::pair<uint64_t, uint64_t>> pairs) {
  SencWriter w;
  uint64_t next = 0;
  for (auto [pos, val] : pairs) {
    if (pos < next) throw std::invalid_argument("list positions must be strictly increasing");
    if (pos >= n) throw std::invalid_argument("list position out of range");
    if (val == 0) throw std::invalid_argument("list values must be positive");
    w.append_zeros(pos - next);
    w.append_literal(val);
    next = pos + 1;
  }
  w.append_zeros(n - next);
  return w.finish();
}

SparseEncoding senc_from_positions(uint64_t n, std::span<const uint64_t> positions) {
  SencWriter w;
  uint64_t next = 0;
  for (uint64_t pos : positions) {
    if (pos < next) throw std::invalid_argument("list positions must be strictly increasing");
    if (pos >= n) throw std::invalid_argument("list position out of range");
    w.append_zeros(pos - next);
    w.append_literal(1);
    next = pos + 1;
  }
  w.append_zeros(n - next);
  return w.finish();
}

std::vector<std::pair<uint64_t, uint64_t>> senc_to_list(const SparseEncoding& e) {
  std::vector<std::pair<uint64_t, uint64_t>> out;
  uint64_t pos = 0, at = 0;
  while (pos < e.stream.size()) {
    Token t = read_token(e.stream, pos);
    if (t.literal) {
      out.emplace_back(at, t.value);
      ++at;
    } else {
      at += t.value;
    }
    pos += t.bits;
  }
  if (at != e.decoded_len) throw DecodeError("encoding length mismatch", pos);
  return out;
}

std::vector<uint64_t> senc_to_positions(const SparseEncoding& e) {
  std::vector<uint64_t> out;
  for (auto& pr : senc_to_list(e)) out.push_back(pr.first);
  return out;
}

SparseEncoding senc_truncate_zero_tail(const SparseEncoding& e, uint64_t keep) {
  keep = std::min(keep, e.decoded_len);
  SencWriter w;
  uint64_t pos = 0, at = 0;
  while (pos < e.stream.size() && at < keep) {
    Token t = read_token(e.stream, pos);
    if (t.literal) {
      w.append_piece(0, e.stream, pos, pos + t.bits, 1, 0);
      ++at;
    } else {
      uint64_t take = std::min(t.value, keep - at);
      w.append_zeros(take);
      at += take;
    }
    pos += t.bits;
  }
  w.append_zeros(e.decoded_len - at);
  return w.finish();
}

DeferredEncoder::DeferredEncoder(std::span<const uint64_t> a)
    : prepared_(senc_encode(a).stream), len_(a.size()) {}

SparseEncoding DeferredEncoder::emit() const { return SparseEncoding{prepared_, len_}; }

uint64_t ParseInfo::literal_start_mask() const {
  uint64_t m = 0;
  for (uint32_t i = 0; i < ntok; ++i)
    if (tok[i].literal) m |= uint64_t{1} << tok[i].start;
  return m;
}

std::vector<uint64_t> ParseInfo::nonzero_positions() const {
  std::vector<uint64_t> out;
  for (uint32_t i = 0; i < ntok; ++i)
    if (tok[i].literal) out.push_back(tok[i].a_before);
  return out;
}

uint64_t ParseInfo::rank(uint64_t j) const {
  uint64_t r = 0;
  for (uint32_t i = 0; i < ntok && tok[i].a_before < j; ++i) r += tok[i].literal;
  return r;
}

uint64_t ParseInfo::select(uint64_t j) const {
  for (uint32_t i = 0; i < ntok; ++i) {
    if (tok[i].literal && --j == 0) return tok[i].a_before;
  }
  throw std::invalid_argument("select argument out of range");
}

std::vector<uint64_t> ParseInfo::decode() const {
  std::vector<uint64_t> out;
  out.reserve(a);
  for (uint32_t i = 0; i < ntok; ++i) {
    if (tok[i].literal)
      out.push_back(tok[i].value);
    else
      out.resize(out.size() + tok[i].value, 0);
  }
  return out;
}

namespace {

// Parses the longest valid token prefix of the low `limit` bits of w.
void parse_word(uint64_t w, unsigned limit, ParseInfo& info) {
  w &= low_bits(limit);
  unsigned pos = 0;
  bool prev_zero = false;
  uint64_t a = 0;
  while (pos + 2 <= limit) {
    bool lit = (w >> pos) & 1u;
    uint64_t rest = w >> (pos + 1);
    if (rest == 0) break;
    unsigned z = static_cast<unsigned>(std::countr_zero(rest));
    unsigned end = pos + 2 * z + 2;
    if (end > limit) break;
    if (!lit && prev_zero) break;
    uint64_t v = reverse_low((w >> (pos + 1 + z)) & low_bits(z + 1), z + 1);
    info.tok[info.ntok++] = ParseToken{lit, pos, end, v, a};
    a += lit ? 1 : v;
    pos = end;
    prev_zero = !lit;
  }
}

void finalize(ParseInfo& info) {
  info.a = info.a_plus = info.max_val = 0;
  info.b = 0;
  for (uint32_t i = 0; i < info.ntok; ++i) {
    const ParseToken& t = info.tok[i];
    info.b = t.end;
    if (t.literal) {
      ++info.a;
      ++info.a_plus;
      info.max_val = std::max(info.max_val, t.value);
    } else {
      info.a += t.value;
    }
  }
}

}  // namespace

ParseTable::ParseTable(uint64_t table_n) {
  if (table_n < 2) throw std::invalid_argument("table parameter must be at least 2");
  max_ell_ = std::min(ceil_lg(table_n), 64u);
  k_ = std::min(max_ell_, 16u);
  per_entry_ = std::max(1u, k_ / 2);
  uint64_t entries = uint64_t{1} << k_;
  count_.assign(entries, 0);
  tokens_.resize(entries * per_entry_);
  ParseInfo info;
  for (uint64_t x = 0; x < entries; ++x) {
    info.ntok = 0;
    parse_word(x, k_, info);
    count_[x] = static_cast<uint8_t>(info.ntok);
    for (uint32_t i = 0; i < info.ntok; ++i) {
      const ParseToken& t = info.tok[i];
      tokens_[x * per_entry_ + i] = Packed{static_cast<uint8_t>(t.end), static_cast<uint8_t>(t.literal),
                                           static_cast<uint16_t>(t.value), static_cast<uint16_t>(t.a_before)};
    }
  }
}

std::shared_ptr<const ParseTable> ParseTable::shared(uint64_t table_n) {
  static std::mutex mu;
  static std::map<uint64_t, std::shared_ptr<const ParseTable>> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto& t = tables[table_n];
  if (!t) t = std::make_shared<const ParseTable>(table_n);
  return t;
}

ParseInfo ParseTable::parse_slow(const BitStream& s, uint64_t offset, unsigned ell) const {
  ParseInfo info;
  parse_word(s.read_bits(offset, ell), ell, info);
  finalize(info);
  return info;
}

ParseInfo ParseTable::parse(const BitStream& s, uint64_t offset, unsigned ell) const {
  if (ell > 64) ell = 64;
  uint64_t remaining = offset < s.size() ? s.size() - offset : 0;
  unsigned lim = static_cast<unsigned>(std::min<uint64_t>(ell, remaining));
  if (lim > k_) return parse_slow(s, offset, lim);
  uint64_t x = s.read_bits(offset, k_);
  if (remaining < k_) x |= uint64_t{1} << remaining;
  ParseInfo info;
  const Packed* p = &tokens_[x * per_entry_];
  uint32_t start = 0;
  for (uint32_t i = 0; i < count_[x] && p[i].end <= lim; ++i) {
    info.tok[info.ntok++] = ParseToken{p[i].literal != 0, start, p[i].end, p[i].value, p[i].a_before};
    start = p[i].end;
  }
  finalize(info);
  return info;
}

}  // namespace ssync
