#include "ssync/recompress.hpp"

#include <algorithm>
#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "ssync/mathutil.hpp"

namespace ssync {

using boost::multiprecision::cpp_int;

namespace schedule {

namespace {

constexpr unsigned kCachedHalves = 512;
constexpr uint64_t kSaturate = uint64_t{1} << 62;

struct Powers {
  std::vector<cpp_int> eight, seven;
  std::vector<uint64_t> floors;
  Powers() {
    eight.resize(kCachedHalves);
    seven.resize(kCachedHalves);
    floors.resize(kCachedHalves);
    eight[0] = 1;
    seven[0] = 1;
    for (unsigned h = 1; h < kCachedHalves; ++h) {
      eight[h] = eight[h - 1] * 8;
      seven[h] = seven[h - 1] * 7;
    }
    for (unsigned h = 0; h < kCachedHalves; ++h) {
      cpp_int q = eight[h] / seven[h];
      floors[h] = q >= kSaturate ? kSaturate : static_cast<uint64_t>(q);
    }
  }
};

const Powers& powers() {
  static const Powers p;
  return p;
}

// c * 8^h <= x * 7^h
bool scaled_at_most(unsigned h, uint64_t c, uint64_t x) {
  if (h >= kCachedHalves) return c == 0;
  const Powers& p = powers();
  return cpp_int(c) * p.eight[h] <= cpp_int(x) * p.seven[h];
}

}  // namespace

uint64_t floor_lambda(unsigned k) {
  unsigned h = k / 2;
  return h >= kCachedHalves ? kSaturate : powers().floors[h];
}

uint64_t alpha(unsigned k) {
  uint64_t a = 1;
  for (unsigned j = 0; j < k; ++j) {
    a += floor_lambda(j);
    if (a >= kSaturate) return kSaturate;
  }
  return a;
}

bool lambda_exceeds(unsigned k, uint64_t x) { return !scaled_at_most(k / 2, 1, x); }

bool within_size_bound(unsigned k, uint64_t count, uint64_t n) {
  unsigned h = k / 2;
  if (h >= kCachedHalves) return count == 0;
  const Powers& p = powers();
  return cpp_int(count) * p.eight[h] <= cpp_int(n) * 4 * p.seven[h];
}

bool scaled_lambda_at_most(unsigned k, uint64_t c, uint64_t x) { return scaled_at_most(k / 2, c, x); }

unsigned k_of_tau(uint64_t tau) {
  unsigned j = 0;
  while (scaled_lambda_at_most(j, 16, tau)) ++j;
  return j;
}

unsigned empty_level_bound(uint64_t n) {
  unsigned k = 0;
  uint64_t four_n = n > (kSaturate >> 2) ? kSaturate : 4 * n;
  while (!lambda_exceeds(k, four_n)) ++k;
  return k;
}

double lambda_value(unsigned k) { return std::pow(8.0 / 7.0, static_cast<double>(k / 2)); }

}  // namespace schedule

std::vector<bool> max_dicut(uint32_t nodes, std::span<const DicutEdge> edges) {
  std::vector<std::vector<uint32_t>> out(nodes), in(nodes);
  for (uint32_t e = 0; e < edges.size(); ++e) {
    const DicutEdge& d = edges[e];
    if (d.from >= nodes || d.to >= nodes) throw std::invalid_argument("max_dicut: node id out of range");
    if (d.from == d.to) continue;
    out[d.from].push_back(e);
    in[d.to].push_back(e);
  }
  // 0 = undecided, 1 = L, 2 = R
  std::vector<uint8_t> side(nodes, 0);
  for (uint32_t x = 0; x < nodes; ++x) {
    uint64_t gain_left = 0, gain_right = 0;
    for (uint32_t e : out[x]) {
      uint8_t s = side[edges[e].to];
      gain_left += edges[e].weight * (s == 0 ? 1 : s == 2 ? 2 : 0);
    }
    for (uint32_t e : in[x]) {
      uint8_t s = side[edges[e].from];
      gain_right += edges[e].weight * (s == 0 ? 1 : s == 1 ? 2 : 0);
    }
    side[x] = gain_left >= gain_right ? 1 : 2;
  }
  std::vector<bool> in_left(nodes);
  for (uint32_t x = 0; x < nodes; ++x) in_left[x] = side[x] == 1;
  return in_left;
}

uint64_t cut_weight(std::span<const DicutEdge> edges, const std::vector<bool>& in_left) {
  uint64_t w = 0;
  for (const DicutEdge& d : edges)
    if (d.from != d.to && in_left[d.from] && !in_left[d.to]) w += d.weight;
  return w;
}

const std::vector<uint64_t>& BoundaryChain::level(unsigned k) const {
  static const std::vector<uint64_t> empty;
  return k < levels.size() ? levels[k] : empty;
}

namespace {

struct Phrase {
  uint64_t start;
  uint64_t len;
};

std::vector<Phrase> phrases_of(uint64_t n, std::span<const uint64_t> bk) {
  std::vector<Phrase> ph;
  ph.reserve(bk.size() + 1);
  uint64_t prev = 0;
  for (uint64_t f : bk) {
    ph.push_back({prev, f - prev});
    prev = f;
  }
  ph.push_back({prev, n - prev});
  return ph;
}

bool same_string(const std::vector<uint32_t>& s, const Phrase& a, const Phrase& b) {
  return a.len == b.len &&
         std::equal(s.begin() + static_cast<std::ptrdiff_t>(a.start),
                    s.begin() + static_cast<std::ptrdiff_t>(a.start + a.len),
                    s.begin() + static_cast<std::ptrdiff_t>(b.start));
}

bool less_string(const std::vector<uint32_t>& s, const Phrase& a, const Phrase& b) {
  if (a.len != b.len) return a.len < b.len;
  auto ai = s.begin() + static_cast<std::ptrdiff_t>(a.start);
  auto bi = s.begin() + static_cast<std::ptrdiff_t>(b.start);
  return std::lexicographical_compare(ai, ai + static_cast<std::ptrdiff_t>(a.len), bi,
                                      bi + static_cast<std::ptrdiff_t>(b.len));
}

// Stable LSD radix sort of idx by (primary, secondary), 8-bit digits.
void radix_sort(std::vector<uint32_t>& idx, const std::vector<uint64_t>& primary,
                const std::vector<uint64_t>& secondary) {
  std::vector<uint32_t> tmp(idx.size());
  auto pass = [&](const std::vector<uint64_t>& key, unsigned shift) {
    std::array<size_t, 257> cnt{};
    for (uint32_t i : idx) ++cnt[((key[i] >> shift) & 0xff) + 1];
    for (int d = 0; d < 256; ++d) cnt[d + 1] += cnt[d];
    for (uint32_t i : idx) tmp[cnt[(key[i] >> shift) & 0xff]++] = i;
    idx.swap(tmp);
  };
  auto sort_by = [&](const std::vector<uint64_t>& key) {
    uint64_t mx = 0;
    for (uint32_t i : idx) mx |= key[i];
    for (unsigned shift = 0; shift < 64 && (mx >> shift) != 0; shift += 8) pass(key, shift);
  };
  sort_by(secondary);
  sort_by(primary);
}

// Canonical ids for the given phrases: equal strings share an id, ids follow
// (length, lexicographic) order.
std::vector<uint64_t> canonical_ids(const PackedText& t, const std::vector<Phrase>& ph,
                                    std::span<const uint32_t> which) {
  const auto& s = t.symbols();
  std::vector<uint32_t> order(which.begin(), which.end());
  uint64_t max_len = 0;
  for (uint32_t i : which) max_len = std::max(max_len, ph[i].len);
  unsigned bps = t.bits_per_symbol();
  if (max_len * bps <= 64) {
    std::vector<uint64_t> lens(ph.size(), 0), keys(ph.size(), 0);
    for (uint32_t i : which) {
      lens[i] = ph[i].len;
      uint64_t v = 0;
      for (uint64_t j = 0; j < ph[i].len; ++j) v = (v << bps) | s[ph[i].start + j];
      keys[i] = v;
    }
    radix_sort(order, lens, keys);
  } else {
    std::sort(order.begin(), order.end(),
              [&](uint32_t a, uint32_t b) { return less_string(s, ph[a], ph[b]); });
  }
  std::vector<uint64_t> id(ph.size(), UINT64_MAX);
  uint64_t next = 0;
  for (size_t j = 0; j < order.size(); ++j) {
    if (j > 0 && !same_string(s, ph[order[j - 1]], ph[order[j]])) ++next;
    id[order[j]] = next;
  }
  return id;
}

}  // namespace

PhraseNames phrase_names(const PackedText& t, std::span<const uint64_t> bk) {
  auto ph = phrases_of(t.n(), bk);
  std::vector<uint32_t> all(ph.size());
  std::iota(all.begin(), all.end(), 0u);
  PhraseNames out;
  out.names = canonical_ids(t, ph, all);
  for (auto& p : ph) out.lengths.push_back(p.len);
  return out;
}

std::vector<uint64_t> round_even(const PackedText& t, std::span<const uint64_t> bk, unsigned k) {
  if (k % 2 != 0) throw std::invalid_argument("round_even: odd level");
  uint64_t lam = schedule::floor_lambda(k);
  auto ph = phrases_of(t.n(), bk);
  const auto& s = t.symbols();
  std::vector<uint64_t> next;
  next.reserve(bk.size());
  for (size_t i = 1; i < ph.size(); ++i) {
    if (std::max(ph[i - 1].len, ph[i].len) > lam || !same_string(s, ph[i - 1], ph[i]))
      next.push_back(ph[i].start);
  }
  return next;
}

std::vector<uint64_t> round_odd(const PackedText& t, std::span<const uint64_t> bk, unsigned k) {
  if (k % 2 != 1) throw std::invalid_argument("round_odd: even level");
  uint64_t lam = schedule::floor_lambda(k);
  auto ph = phrases_of(t.n(), bk);
  std::vector<uint8_t> part(ph.size(), 0);
  for (size_t i = 1; i < ph.size(); ++i) {
    if (ph[i - 1].len <= lam && ph[i].len <= lam) part[i - 1] = part[i] = 1;
  }
  std::vector<uint32_t> which;
  for (uint32_t i = 0; i < ph.size(); ++i)
    if (part[i]) which.push_back(i);
  auto id = canonical_ids(t, ph, which);
  uint32_t nodes = 0;
  for (uint32_t i : which) nodes = std::max<uint32_t>(nodes, static_cast<uint32_t>(id[i] + 1));
  std::vector<DicutEdge> edges;
  for (size_t i = 1; i < ph.size(); ++i) {
    if (ph[i - 1].len <= lam && ph[i].len <= lam)
      edges.push_back({static_cast<uint32_t>(id[i - 1]), static_cast<uint32_t>(id[i]), 1});
  }
  auto in_left = max_dicut(nodes, edges);
  std::vector<uint64_t> next;
  next.reserve(bk.size());
  for (size_t i = 1; i < ph.size(); ++i) {
    bool merge = ph[i - 1].len <= lam && ph[i].len <= lam && id[i - 1] != id[i] &&
                 in_left[id[i - 1]] && !in_left[id[i]];
    if (!merge) next.push_back(ph[i].start);
  }
  return next;
}

std::vector<uint64_t> advance_round(const PackedText& t, std::span<const uint64_t> bk, unsigned k) {
  return k % 2 == 0 ? round_even(t, bk, k) : round_odd(t, bk, k);
}

namespace {

void extend_chain(const PackedText& t, std::vector<std::vector<uint64_t>>& levels, unsigned first) {
  unsigned limit = schedule::empty_level_bound(t.n()) + 2;
  unsigned k = first + static_cast<unsigned>(levels.size()) - 1;
  while (!levels.back().empty()) {
    if (k > limit) throw std::logic_error("recompression failed to terminate");
    levels.push_back(advance_round(t, levels.back(), k));
    ++k;
  }
}

}  // namespace

BoundaryChain build_chain_linear(const PackedText& t) {
  BoundaryChain c;
  c.n = t.n();
  std::vector<uint64_t> b0;
  for (uint64_t i = 1; i < t.n(); ++i) b0.push_back(i);
  c.levels.push_back(std::move(b0));
  extend_chain(t, c.levels, 0);
  return c;
}

BitStream context_to_bitmask(const BitStream& seq, uint64_t count, unsigned bps, unsigned ell,
                             const std::function<bool(uint64_t)>& member) {
  BitStream out;
  if (ell == 0) throw std::invalid_argument("context_to_bitmask: empty pattern");
  if (uint64_t{ell} * bps > 64) throw std::invalid_argument("context_to_bitmask: pattern exceeds a word");
  if (count < ell) return out;
  out.reserve_bits(count - ell + 1);
  uint64_t pat_mask = low_bits(ell * bps);
  bool blockwise = uint64_t{2 * ell - 1} * bps <= 64;
  if (!blockwise) {
    for (uint64_t i = 0; i + ell <= count; ++i) out.append_bit(member(seq.read_bits(i * bps, ell * bps)));
    return out;
  }
  std::unordered_map<uint64_t, uint64_t> memo;
  uint64_t blocks = count / ell;
  for (uint64_t j = 0; j < blocks; ++j) {
    uint64_t start = j * ell;
    unsigned len = static_cast<unsigned>(std::min<uint64_t>(start + 2 * ell - 1, count) - start);
    unsigned nbits = len - ell + 1;
    uint64_t content = seq.read_bits(start * bps, len * bps);
    bool full = len == 2 * ell - 1;
    auto it = full ? memo.find(content) : memo.end();
    uint64_t mask;
    if (it != memo.end()) {
      mask = it->second;
    } else {
      mask = 0;
      for (unsigned x = 0; x < nbits; ++x)
        if (member((content >> (x * bps)) & pat_mask)) mask |= uint64_t{1} << x;
      if (full) memo.emplace(content, mask);
    }
    out.append_bits(mask, nbits);
  }
  return out;
}

std::vector<uint64_t> bitmask_to_list(const BitStream& m) {
  static const auto table = [] {
    std::array<std::vector<uint8_t>, 256> t;
    for (unsigned x = 0; x < 256; ++x)
      for (uint8_t b = 0; b < 8; ++b)
        if ((x >> b) & 1u) t[x].push_back(b);
    return t;
  }();
  std::vector<uint64_t> out;
  for (uint64_t i = 0; i < m.size(); i += 8) {
    unsigned chunk = static_cast<unsigned>(m.read_bits(i, 8));
    for (uint8_t b : table[chunk]) out.push_back(i + b);
  }
  return out;
}

namespace {

// Big-endian value of a packed string, used for lexicographic node order.
uint64_t lex_key(uint64_t content, unsigned len, unsigned bps) {
  uint64_t v = 0;
  for (unsigned j = 0; j < len; ++j) v = (v << bps) | ((content >> (j * bps)) & low_bits(bps));
  return v;
}

}  // namespace

ContextSets::ContextSets(const PackedText& t, unsigned K, uint64_t table_n) : K_(K) {
  unsigned bps = t.bits_per_symbol();
  uint64_t aK = schedule::alpha(K);
  if (2 * aK * bps > floor_lg(table_n)) throw std::invalid_argument("context sets exceed table budget");
  uint64_t pad = 2 * aK;
  BitStream padded = t.padded(pad);
  SubstringCounter counter(padded, t.n() + 2 * pad, bps, static_cast<unsigned>(2 * aK), table_n);

  sets_.resize(K + 1);
  {
    unsigned bits = 2 * bps;
    sets_[0] = BitStream::zeros(uint64_t{1} << bits);
    uint64_t all_dollar = low_bits(bits);
    for (uint64_t c = 0; c < (uint64_t{1} << bits); ++c)
      if (c != all_dollar && counter.count(c, 2) > 0) sets_[0].set(c);
  }
  struct Entry {
    uint64_t content;
    unsigned ell, r;
  };
  for (unsigned k = 0; k < K; ++k) {
    unsigned a = static_cast<unsigned>(schedule::alpha(k));
    unsigned a1 = static_cast<unsigned>(schedule::alpha(k + 1));
    unsigned lam = a1 - a;
    unsigned L = 2 * a1;
    unsigned bits = L * bps;
    uint64_t total = uint64_t{1} << bits;
    uint64_t all_dollar = low_bits(bits);
    const BitStream& ck = sets_[k];
    BitStream& next = sets_[k + 1];
    next = BitStream::zeros(total);
    uint64_t ctx_mask = low_bits(2 * a * bps);
    std::vector<Entry> list;
    for (uint64_t c = 0; c < total; ++c) {
      if (c == all_dollar || counter.count(c, L) == 0) continue;
      auto window = [&](unsigned off) { return (c >> (off * bps)) & ctx_mask; };
      if (!ck.get(window(lam))) continue;
      unsigned ell = 0, r = 0;
      for (unsigned e = 1; e <= lam && !ell; ++e)
        if (ck.get(window(lam - e))) ell = e;
      for (unsigned e = 1; e <= lam && !r; ++e)
        if (ck.get(window(lam + e))) r = e;
      if (!ell || !r)
        next.set(c);
      else
        list.push_back({c, ell, r});
    }
    auto piece = [&](uint64_t c, unsigned off, unsigned len) {
      return (c >> (off * bps)) & low_bits(len * bps);
    };
    if (k % 2 == 0) {
      for (const Entry& e : list) {
        if (e.ell != e.r || piece(e.content, a1 - e.ell, e.ell) != piece(e.content, a1, e.r))
          next.set(e.content);
      }
      continue;
    }
    // Node keys: (length, lexicographic value).
    std::vector<std::pair<uint64_t, uint64_t>> keys;
    auto node_key = [&](uint64_t content, unsigned len) {
      return std::make_pair(uint64_t{len}, lex_key(content, len, bps));
    };
    for (const Entry& e : list) {
      keys.push_back(node_key(piece(e.content, a1 - e.ell, e.ell), e.ell));
      keys.push_back(node_key(piece(e.content, a1, e.r), e.r));
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    auto id_of = [&](std::pair<uint64_t, uint64_t> key) {
      return static_cast<uint32_t>(std::lower_bound(keys.begin(), keys.end(), key) - keys.begin());
    };
    std::vector<DicutEdge> edges;
    std::vector<std::pair<uint32_t, uint32_t>> ends;
    for (const Entry& e : list) {
      uint32_t u = id_of(node_key(piece(e.content, a1 - e.ell, e.ell), e.ell));
      uint32_t v = id_of(node_key(piece(e.content, a1, e.r), e.r));
      ends.emplace_back(u, v);
      edges.push_back({u, v, counter.count(e.content, L)});
    }
    auto in_left = max_dicut(static_cast<uint32_t>(keys.size()), edges);
    for (size_t j = 0; j < list.size(); ++j) {
      auto [u, v] = ends[j];
      if (!(u != v && in_left[u] && !in_left[v])) next.set(list[j].content);
    }
  }
}

int Recompressor::packed_rounds(const PackedText& t, const RecompressOptions& opt) {
  if (t.n() < 2) return -1;
  unsigned bps = t.bits_per_symbol();
  unsigned budget_bits = floor_lg(std::max<uint64_t>(opt.table_n, 2));
  if (2 * bps > budget_bits) return -1;
  double log_sigma_n = std::log2(static_cast<double>(t.n())) / bps;
  if (!(opt.fallback_threshold > 0) || log_sigma_n < opt.fallback_threshold) return -1;
  double ratio = log_sigma_n / opt.fallback_threshold;
  int h = 0;
  while (std::pow(8.0 / 7.0, h + 1) <= ratio * (1 + 1e-12)) ++h;
  int k_formula = 2 * h;
  int k_budget = 0;
  while (2 * schedule::alpha(static_cast<unsigned>(k_budget + 1)) * bps <= budget_bits) ++k_budget;
  return std::min(k_formula, k_budget);
}

Recompressor::Recompressor(const PackedText& t, RecompressOptions opt) : text_(t), opt_(opt) {
  int K = packed_rounds(text_, opt_);
  if (K < 0) {
    auto c = build_chain_linear(text_);
    levels_ = std::move(c.levels);
    first_stored_ = 0;
    q_ = static_cast<unsigned>(levels_.size()) - 1;
    return;
  }
  packed_ = true;
  K_ = static_cast<unsigned>(K);
  ctx_ = std::make_shared<ContextSets>(text_, K_, opt_.table_n);
  q_ = K_ + 1;
  for (unsigned k = 0; k <= K_; ++k) {
    if (bk_bitmask(k).popcount() == 0) {
      q_ = k;
      break;
    }
  }
  first_stored_ = K_;
  levels_.push_back(q_ <= K_ ? std::vector<uint64_t>{} : bitmask_to_list(bk_bitmask(K_)));
  extend_chain(text_, levels_, K_);
  if (q_ > K_) q_ = K_ + static_cast<unsigned>(levels_.size()) - 1;
}

BitStream Recompressor::bk_bitmask(unsigned k) const {
  uint64_t n = text_.n();
  if (packed_ && k <= K_ && (k < q_ || q_ > K_)) {
    uint64_t a = schedule::alpha(k);
    unsigned bps = text_.bits_per_symbol();
    BitStream padded = text_.padded(a);
    const ContextSets& cs = *ctx_;
    BitStream m = context_to_bitmask(padded, n + 2 * a, bps, static_cast<unsigned>(2 * a),
                                     [&](uint64_t c) { return cs.contains(k, c); });
    m = fit(m, n, false);
    if (n) m.set(0, false);
    return m;
  }
  BitStream m = BitStream::zeros(n);
  for (uint64_t p : bk_explicit(k)) m.set(p);
  return m;
}

std::vector<uint64_t> Recompressor::bk_explicit(unsigned k) const {
  if (k >= q_) return {};
  if (packed_ && k < K_) return bitmask_to_list(bk_bitmask(k));
  return levels_[k - first_stored_];
}

BoundaryChain Recompressor::chain() const {
  BoundaryChain c;
  c.n = text_.n();
  for (unsigned k = 0; k <= q_; ++k) c.levels.push_back(bk_explicit(k));
  return c;
}

}  // namespace ssync
