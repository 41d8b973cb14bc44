#include "ssync/ranksupport.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "ssync/errors.hpp"

namespace ssync {

namespace {
constexpr uint64_t kBlockBits = 512;
constexpr uint64_t kWordsPerBlock = kBlockBits / 64;
constexpr uint64_t kSampleOnes = 512;
}  // namespace

BitRankSelect::BitRankSelect(BitStream bits) : bits_(std::move(bits)) {
  const auto& w = bits_.words();
  uint64_t blocks = (w.size() + kWordsPerBlock - 1) / kWordsPerBlock;
  block_rank_.assign(blocks + 1, 0);
  uint64_t acc = 0;
  for (uint64_t b = 0; b < blocks; ++b) {
    block_rank_[b] = acc;
    for (uint64_t k = b * kWordsPerBlock; k < std::min<uint64_t>(w.size(), (b + 1) * kWordsPerBlock); ++k) {
      uint64_t before = acc;
      acc += static_cast<uint64_t>(std::popcount(w[k]));
      for (uint64_t s = (before + kSampleOnes - 1) / kSampleOnes * kSampleOnes; s < acc; s += kSampleOnes)
        samples_.push_back(b);
    }
  }
  block_rank_[blocks] = acc;
  total_ = acc;
}

uint64_t BitRankSelect::rank(uint64_t i) const {
  if (i > bits_.size()) throw std::invalid_argument("rank position out of range");
  uint64_t b = i / kBlockBits;
  uint64_t r = block_rank_.empty() ? 0 : block_rank_[b];
  const auto& w = bits_.words();
  for (uint64_t k = b * kWordsPerBlock; k < i / 64; ++k) r += static_cast<uint64_t>(std::popcount(w[k]));
  if (i % 64) r += static_cast<uint64_t>(std::popcount(w[i / 64] & low_bits(i % 64)));
  return r;
}

uint64_t BitRankSelect::select(uint64_t j) const {
  if (j == 0 || j > total_) throw std::invalid_argument("select index out of range");
  uint64_t b = samples_[(j - 1) / kSampleOnes];
  while (block_rank_[b + 1] < j) ++b;
  uint64_t need = j - block_rank_[b];
  const auto& w = bits_.words();
  for (uint64_t k = b * kWordsPerBlock;; ++k) {
    uint64_t c = static_cast<uint64_t>(std::popcount(w[k]));
    if (c >= need) {
      uint64_t x = w[k];
      for (uint64_t t = 1; t < need; ++t) x &= x - 1;
      return k * 64 + static_cast<uint64_t>(std::countr_zero(x));
    }
    need -= c;
  }
}

Decomposition::Decomposition(const SparseEncoding& mask, uint64_t table_n)
    : enc_(std::make_shared<const SparseEncoding>(mask)),
      table_(ParseTable::shared(table_n)),
      ell_(table_->max_ell()) {
  const BitStream& s = enc_->stream;
  uint64_t p = 0, e = 0, r = 0;
  pieces_.push_back({0, 0, 0});
  bool trailing_run = false;
  while (e < s.size()) {
    ParseInfo info = table_->parse(s, e, ell_);
    if (info.b > 0) {
      if (info.max_val > 1) throw InvalidInput("encoding is not a bitmask");
      if (trailing_run && !info.tok[0].literal) throw DecodeError("consecutive zero-run tokens", e);
      trailing_run = !info.tok[info.ntok - 1].literal;
      p += info.a;
      r += info.a_plus;
      e += info.b;
    } else {
      Token tk = read_token(s, e);
      if (tk.literal) {
        if (tk.value != 1) throw InvalidInput("encoding is not a bitmask");
        ++p;
        ++r;
        trailing_run = false;
      } else {
        if (trailing_run) throw DecodeError("consecutive zero-run tokens", e);
        p += tk.value;
        trailing_run = true;
      }
      e += tk.bits;
    }
    if (p > enc_->decoded_len) throw DecodeError("encoding longer than declared", e);
    pieces_.push_back({p, e, r});
  }
  if (p != enc_->decoded_len) throw DecodeError("encoding shorter than declared", e);
}

ParseInfo Decomposition::parse_piece(uint64_t i) const {
  return table_->parse(enc_->stream, pieces_[i].e, static_cast<unsigned>(pieces_[i + 1].e - pieces_[i].e));
}

uint64_t Decomposition::rank_in(uint64_t i, uint64_t j) const {
  const Piece& a = pieces_[i];
  if (all_zero(i) || pieces_[i + 1].e - a.e > ell_) return a.r;
  return a.r + parse_piece(i).rank(j - a.p);
}

uint64_t Decomposition::select_in(uint64_t i, uint64_t j) const {
  const Piece& a = pieces_[i];
  if (pieces_[i + 1].e - a.e > ell_) return a.p;
  return a.p + parse_piece(i).select(j - a.r);
}

uint64_t Decomposition::literal_starts(uint64_t i) const {
  if (all_zero(i)) return 0;
  if (pieces_[i + 1].e - pieces_[i].e > ell_) return 1;
  return parse_piece(i).literal_start_mask();
}

SelectSupport::SelectSupport(const SparseEncoding& mask, uint64_t table_n)
    : dec_(std::make_shared<const Decomposition>(mask, table_n)) {
  build();
}

SelectSupport::SelectSupport(std::shared_ptr<const Decomposition> d) : dec_(std::move(d)) { build(); }

void SelectSupport::build() {
  const auto& ps = dec_->pieces();
  uint64_t len = dec_->encoding().stream.size();
  BitStream c = BitStream::zeros(len), b = BitStream::zeros(len);
  auto& cw = c.raw_words();
  for (uint64_t i = 0; i + 1 < ps.size(); ++i) {
    b.set(ps[i].e);
    uint64_t mask = dec_->literal_starts(i);
    uint64_t e = ps[i].e;
    if (mask == 0) continue;
    cw[e / 64] |= mask << (e % 64);
    if (e % 64 && (mask >> (64 - e % 64))) cw[e / 64 + 1] |= mask >> (64 - e % 64);
  }
  literal_ = BitRankSelect(std::move(c));
  boundary_ = BitRankSelect(std::move(b));
}

uint64_t SelectSupport::select(uint64_t j) const {
  if (j == 0 || j > ones()) throw std::invalid_argument("select index out of range");
  uint64_t pos = literal_.select(j);
  uint64_t i = boundary_.rank(pos + 1) - 1;
  return dec_->select_in(i, j);
}

struct VebIndex::Node {
  struct Group {
    uint64_t prefix;
    uint64_t lo, hi;      // smallest and largest key of the group
    uint64_t start, end;  // keys of the node before and through the group
    std::shared_ptr<const Node> child;
  };
  bool base = true;
  std::vector<uint64_t> keys;
  unsigned low = 0;
  uint64_t min = 0;
  std::vector<Group> groups;
  std::vector<uint32_t> table;  // groups with prefix <= c, when direct
  std::vector<uint64_t> prefixes;
  std::shared_ptr<const Node> upper;

  uint64_t count_le(uint64_t x) const {
    if (base) return static_cast<uint64_t>(std::upper_bound(keys.begin(), keys.end(), x) - keys.begin());
    if (x < min) return 0;
    uint64_t jp = low >= 64 ? 0 : x >> low;
    const Group* g;
    if (!table.empty()) {
      uint64_t k = jp < table.size() ? table[jp] : groups.size();
      g = &groups[k - 1];
    } else {
      auto it = std::lower_bound(prefixes.begin(), prefixes.end(), jp);
      if (it != prefixes.end() && *it == jp)
        g = &groups[static_cast<size_t>(it - prefixes.begin())];
      else
        return groups[upper->count_le(jp) - 1].end;
    }
    if (g->prefix != jp || g->hi <= x) return g->end;
    if (x < g->lo) return g->start;
    return g->start + g->child->count_le(x & low_bits(low));
  }
};

namespace {

struct VebParams {
  unsigned stop_bits;
  uint64_t table_n;
  uint64_t space;
};

std::shared_ptr<const VebIndex::Node> build_node(const std::vector<uint64_t>& keys, unsigned bits, unsigned top_bits,
                                                 const VebParams& prm, unsigned level, unsigned& depth) {
  auto node = std::make_shared<VebIndex::Node>();
  depth = std::max(depth, level + 1);
  bool root = top_bits != 0 || level == 0;
  if (keys.size() <= 2 || (!root && (bits <= 1 || bits <= prm.stop_bits))) {
    node->keys = keys;
    return node;
  }
  node->base = false;
  node->low = root ? bits - std::min(top_bits, bits) : bits / 2;
  unsigned hi_bits = bits - node->low;
  node->min = keys.front();
  std::vector<uint64_t> lower;
  for (size_t a = 0; a < keys.size();) {
    uint64_t pre = node->low >= 64 ? 0 : keys[a] >> node->low;
    size_t b = a;
    while (b < keys.size() && (node->low >= 64 ? 0 : keys[b] >> node->low) == pre) ++b;
    VebIndex::Node::Group g{pre, keys[a], keys[b - 1], a, b, nullptr};
    if (b - a >= 2) {
      lower.clear();
      for (size_t k = a; k + 1 < b; ++k) lower.push_back(keys[k] & low_bits(node->low));
      g.child = build_node(lower, node->low, 0, prm, level + 1, depth);
    }
    node->groups.push_back(std::move(g));
    node->prefixes.push_back(pre);
    a = b;
  }
  uint64_t universe = hi_bits >= 63 ? UINT64_MAX : uint64_t{1} << hi_bits;
  bool direct = root ? universe <= std::max<uint64_t>(prm.space, 1)
                     : universe <= prm.table_n && universe <= 16 * node->groups.size() + 16;
  if (direct) {
    node->table.assign(universe, 0);
    size_t g = 0;
    for (uint64_t c = 0; c < universe; ++c) {
      while (g < node->groups.size() && node->groups[g].prefix <= c) ++g;
      node->table[c] = static_cast<uint32_t>(g);
    }
    node->prefixes.clear();
  } else {
    node->upper = build_node(node->prefixes, hi_bits, 0, prm, level + 1, depth);
  }
  return node;
}

}  // namespace

VebIndex::VebIndex(std::vector<uint64_t> keys, unsigned bits, uint64_t space, unsigned word, uint64_t table_n)
    : keys_(std::move(keys)), bits_(bits) {
  if (bits == 0 || bits > 64) throw std::invalid_argument("key width must be in [1..64]");
  for (size_t i = 0; i < keys_.size(); ++i) {
    if (i > 0 && keys_[i] <= keys_[i - 1]) throw std::invalid_argument("keys must be strictly increasing");
    if (bits < 64 && (keys_[i] >> bits) != 0) throw std::invalid_argument("key outside the universe");
  }
  word = std::max(word, 2u);
  stride_ = uint64_t{word} * word;
  if (keys_.size() <= stride_) return;
  for (uint64_t i = 0; i < keys_.size(); i += stride_) sampled_.push_back(keys_[i]);
  uint64_t n = sampled_.size();
  space = std::max(space, n);
  double a = std::log2(static_cast<double>(space) / static_cast<double>(n)) + std::log2(static_cast<double>(word));
  VebParams prm{static_cast<unsigned>(a / 2), table_n, space};
  unsigned top = std::max(1u, std::min(floor_lg(space), bits));
  root_ = build_node(sampled_, bits, top, prm, 0, depth_);
}

uint64_t VebIndex::count_le(uint64_t x) const {
  if (keys_.empty() || x < keys_.front()) return 0;
  if (bits_ < 64 && (x >> bits_) != 0) return keys_.size();
  if (!root_) return static_cast<uint64_t>(std::upper_bound(keys_.begin(), keys_.end(), x) - keys_.begin());
  uint64_t r = root_->count_le(x);
  uint64_t from = (r - 1) * stride_;
  uint64_t to = std::min<uint64_t>(keys_.size(), r * stride_);
  return from + static_cast<uint64_t>(std::upper_bound(keys_.begin() + static_cast<int64_t>(from),
                                                       keys_.begin() + static_cast<int64_t>(to), x) -
                                      (keys_.begin() + static_cast<int64_t>(from)));
}

uint64_t VebIndex::rank(uint64_t x) const {
  uint64_t c = count_le(x);
  return c > 0 && keys_[c - 1] == x ? c - 1 : c;
}

std::optional<uint64_t> VebIndex::pred(uint64_t x) const {
  uint64_t c = count_le(x);
  if (c == 0) return std::nullopt;
  return keys_[c - 1];
}

RankSupport::RankSupport(const SparseEncoding& mask, uint64_t table_n, uint64_t m)
    : dec_(std::make_shared<const Decomposition>(mask, table_n)) {
  build(m);
}

RankSupport::RankSupport(std::shared_ptr<const Decomposition> d, uint64_t m) : dec_(std::move(d)) { build(m); }

void RankSupport::build(uint64_t m) {
  const auto& ps = dec_->pieces();
  uint64_t n = ps.back().p;
  uint64_t lgN = std::max(1u, dec_->window());
  uint64_t floor_m = (dec_->encoding().stream.size() + lgN - 1) / lgN;
  if (m == 0) m = std::max<uint64_t>(1, floor_m);
  std::vector<uint64_t> keys;
  keys.reserve(ps.size());
  for (size_t i = 0; i + 1 < ps.size(); ++i) keys.push_back(ps[i].p);
  unsigned bits = std::max(1u, ceil_lg(n + 1));
  unsigned w = std::max(8u, ceil_lg(n + 1));
  veb_ = VebIndex(std::move(keys), bits, m + ps.size(), w);
}

uint64_t RankSupport::rank(uint64_t j) const {
  uint64_t n = this->n();
  if (j > n) throw std::invalid_argument("rank position out of range");
  if (j == n) return dec_->pieces().back().r;
  uint64_t i = veb_.count_le(j) - 1;
  return dec_->rank_in(i, j);
}

SparseMaskSupport::SparseMaskSupport(const SparseEncoding& mask, uint64_t table_n, uint64_t m)
    : dec_(std::make_shared<const Decomposition>(mask, table_n)), select_(dec_), rank_(dec_, m) {}

std::optional<uint64_t> SparseMaskSupport::pred(uint64_t j) const {
  if (n() == 0) return std::nullopt;
  uint64_t k = rank(std::min(j, n() - 1) + 1);
  if (k == 0) return std::nullopt;
  return select(k);
}

}  // namespace ssync
