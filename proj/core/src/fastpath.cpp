#include "ssync/fastpath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "ssync/errors.hpp"
#include "ssync/mathutil.hpp"
#include "ssync/runs.hpp"

namespace ssync {

namespace {

TransducerSpec single_state(unsigned t, TransitionFn f) {
  TransducerSpec s;
  s.q = 1;
  s.t = t;
  s.delta = std::move(f);
  return s;
}

SparseEncoding ones_then_zeros(uint64_t ones, uint64_t zeros) {
  SencWriter w;
  for (uint64_t i = 0; i < ones; ++i) w.append_literal(1);
  w.append_zeros(zeros);
  return w.finish();
}

// Integer whose binary form is a 1 followed by senc(values) in stream order.
uint64_t entry_code(const std::vector<uint64_t>& values) {
  SparseEncoding e = senc_encode(values);
  if (e.stream.size() > 61) throw std::logic_error("run entry too wide");
  uint64_t acc = 1;
  for (uint64_t i = 0; i < e.stream.size(); ++i) acc = (acc << 1) | (e.stream.get(i) ? 1u : 0u);
  return acc;
}

std::optional<std::vector<uint64_t>> entry_values(uint64_t x) {
  std::vector<uint64_t> out;
  if (x == 0) return out;
  unsigned len = floor_lg(x);
  auto bit = [&](unsigned i) { return (x >> (len - 1 - i)) & 1u; };
  unsigned pos = 0;
  while (pos < len) {
    bool literal = bit(pos) != 0;
    unsigned z = 0;
    while (pos + 1 + z < len && bit(pos + 1 + z) == 0) ++z;
    if (pos + 2 * z + 2 > len) return std::nullopt;
    uint64_t v = (x >> (len - (pos + 2 * z + 2))) & low_bits(z + 1);
    pos += 2 * z + 2;
    if (literal)
      out.push_back(v);
    else
      out.resize(out.size() + v, 0);
  }
  return out;
}

// 1 . senc([0])
constexpr uint64_t kNoRunEntry = 0b101;

// Pairs (period, capped length) of the relevant runs starting (or ending) at i.
std::vector<uint64_t> short_runs_at(const PackedText& t, int64_t i, uint64_t P, bool ends) {
  uint64_t cap = 8 * P;
  int64_t dir = ends ? -1 : 1;
  auto sym = [&](int64_t k) { return t.at(k); };
  std::vector<uint64_t> out;
  for (uint64_t p = 1; p < P; ++p) {
    int64_t ip = static_cast<int64_t>(p);
    if (sym(i - dir) == sym(i - dir + dir * ip)) continue;
    uint64_t len = p;
    while (len < cap) {
      int64_t a = i + dir * static_cast<int64_t>(len - p);
      int64_t b = a + dir * ip;
      if (a < 0 || b < 0 || b >= static_cast<int64_t>(t.n()) || a >= static_cast<int64_t>(t.n()) ||
          sym(a) != sym(b))
        break;
      ++len;
    }
    if (len < 3 * p) continue;
    bool smaller = false;
    for (uint64_t q = 1; q < p && !smaller; ++q) {
      bool ok = true;
      for (uint64_t k = 0; k + q < len && ok; ++k)
        ok = sym(i + dir * static_cast<int64_t>(k)) == sym(i + dir * static_cast<int64_t>(k + q));
      smaller = ok;
    }
    if (smaller) continue;
    out.push_back(p);
    out.push_back(len);
  }
  return out;
}

}  // namespace

bool senc_all_zero(const SparseEncoding& e) {
  if (e.stream.empty()) return true;
  if (e.stream.get(0)) return false;
  return read_token(e.stream, 0).bits == e.stream.size();
}

SparseEncoding shift_truncate(const SparseEncoding& v, uint64_t ell, AccelCache& cache) {
  uint64_t n = v.decoded_len;
  if (ell == 0) return v;
  if (ell >= n) throw std::invalid_argument("shift_truncate: ell must be below n");
  SencWriter w1;
  w1.append_encoding(v);
  for (uint64_t i = 0; i < ell; ++i) w1.append_literal(1);
  std::vector<SparseEncoding> in{w1.finish(), ones_then_zeros(ell, n), SparseEncoding{}};
  SencWriter w3;
  w3.append_zeros(n);
  for (uint64_t i = 0; i < ell; ++i) w3.append_literal(1);
  in[2] = w3.finish();
  auto spec = single_state(3, [](State, std::span<const uint64_t> c) {
    return Step{0, c[1] ? 1 : c[2] ? 0 : c[0]};
  });
  SparseEncoding out = cache.run_multi("shift", spec, in);
  SparseEncoding r;
  r.stream.append_range(out.stream, 2 * ell, out.stream.size());
  r.decoded_len = n;
  return r;
}

SparseEncoding shift_truncate(const SparseEncoding& v, uint64_t ell) {
  AccelCache cache;
  return shift_truncate(v, ell, cache);
}

SparseEncoding build_level0(const Recompressor& rec, AccelCache& cache) {
  const PackedText& t = rec.text();
  uint64_t n = t.n();
  unsigned q = rec.q();
  unsigned K = rec.packed() ? std::min(rec.K(), q) : 0;

  std::vector<std::pair<uint64_t, uint64_t>> high;
  for (unsigned k = K; k < q; ++k)
    for (uint64_t i : rec.bk_explicit(k)) high.emplace_back(i, k - K + 1);
  std::sort(high.begin(), high.end());
  std::vector<std::pair<uint64_t, uint64_t>> top;
  for (auto& pr : high) {
    if (!top.empty() && top.back().first == pr.first)
      top.back().second = std::max(top.back().second, pr.second);
    else
      top.push_back(pr);
  }
  SparseEncoding bk = senc_from_list(n, top);
  if (K == 0) return bk;

  const ContextSets& cs = *rec.contexts();
  unsigned bps = t.bits_per_symbol();
  uint64_t aK = schedule::alpha(K);
  BitStream padded = t.padded(aK);
  uint64_t padded_len = n + 2 * aK;
  std::unordered_map<uint64_t, SparseEncoding> memo;
  SencWriter w;
  for (uint64_t c0 = 0; c0 < n; c0 += aK) {
    uint64_t width = std::min(aK, n - c0);
    uint64_t len = std::min(3 * aK, padded_len - c0);
    uint64_t block = padded.read_bits(c0 * bps, static_cast<unsigned>(len * bps));
    uint64_t key = (block << 8) | width;
    auto it = memo.find(key);
    if (it == memo.end()) {
      std::vector<uint64_t> h(width, 0);
      for (uint64_t i = 0; i < width; ++i) {
        for (unsigned j = 1; j <= K; ++j) {
          uint64_t a = schedule::alpha(j - 1);
          uint64_t from = i + aK - a;
          uint64_t content = (block >> (from * bps)) & low_bits(static_cast<unsigned>(2 * a * bps));
          if (cs.contains(j - 1, content)) h[i] = j;
        }
      }
      it = memo.emplace(key, senc_encode(h)).first;
    }
    if (c0 == 0) {
      std::vector<uint64_t> first = senc_decode(it->second);
      first[0] = 0;
      w.append_encoding(senc_encode(first));
    } else {
      w.append_encoding(it->second);
    }
  }
  std::vector<SparseEncoding> in{w.finish(), bk};
  auto spec = single_state(2, [K](State, std::span<const uint64_t> c) {
    return Step{0, c[1] == 0 ? c[0] : c[1] + K};
  });
  return cache.run_multi("level0:" + std::to_string(K), spec, in);
}

std::vector<SparseEncoding> derive_levels(const SparseEncoding& level0, AccelCache& cache) {
  auto spec = single_state(1, [](State, std::span<const uint64_t> c) {
    return Step{0, c[0] > 0 ? c[0] - 1 : 0};
  });
  auto h = cache.get("decrement", spec);
  std::vector<SparseEncoding> out{level0};
  while (!senc_all_zero(out.back())) out.push_back(h->run(out.back()));
  return out;
}

SyncSetHandle::SyncSetHandle(SparseEncoding mask, uint64_t table_n, uint64_t m)
    : enc_(std::move(mask)), support_(enc_, table_n, m), m_(m) {}

struct FastSync::LongRuns {
  struct Range {
    uint64_t lo = 0;
    uint64_t period = 0;
    std::vector<Run> runs;
    SparseEncoding start_per, start_len, end_per, end_len;
    bool zipped = true;
  };
  // (floor(1.1^j), j) for j = 0, 1, ... while floor(1.1^j) <= n.
  std::vector<uint64_t> lows;
  std::vector<std::unique_ptr<Range>> ranges;

  unsigned find(uint64_t tau) const {
    unsigned j = static_cast<unsigned>(lows.size()) - 1;
    while (lows[j] > tau) --j;
    return j;
  }
};

struct FastSync::ShortRuns {
  // chains[0] for starts, chains[1] for ends; entry j filters runs shorter than 3 * 2^j.
  std::vector<SparseEncoding> chains[2];
};

FastSync::FastSync(const PackedText& t, FastPathOptions opt) : opt_(opt) {
  builder_ = std::make_unique<SyncBuilder>(t, opt_.sync);
  cache_ = std::make_unique<AccelCache>(opt_.accel);
  const PackedText& tx = builder_->text();
  uint64_t n = tx.n();
  levels_ = derive_levels(build_level0(builder_->recompressor(), *cache_), *cache_);

  if (opt_.transducer_tau_limit != 0) {
    tau_limit_ = opt_.transducer_tau_limit;
  } else {
    uint64_t root = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while ((root + 1) * (root + 1) <= n) ++root;
    while (root * root > n) --root;
    tau_limit_ = root / std::max(1u, floor_lg(std::max<uint64_t>(n, 2)));
  }

  if (opt_.small_period_limit >= 0) {
    if (opt_.small_period_limit > static_cast<int>(kMaxSmallPeriod))
      throw std::invalid_argument("small_period_limit above " + std::to_string(kMaxSmallPeriod));
    period_limit_ = static_cast<uint64_t>(opt_.small_period_limit);
  } else if (n >= 2) {
    double log_sigma = std::log2(static_cast<double>(n)) / tx.bits_per_symbol();
    period_limit_ = std::min<uint64_t>(kMaxSmallPeriod, static_cast<uint64_t>(std::floor(log_sigma / 36.0)));
  }

  PackedLce lce(tx);
  long_ = std::make_unique<LongRuns>();
  {
    using boost::multiprecision::cpp_int;
    cpp_int p11 = 1, p10 = 1;
    std::vector<uint64_t> per;
    while (true) {
      cpp_int f = p11 / p10;
      if (f > n) break;
      long_->lows.push_back(static_cast<uint64_t>(f));
      per.push_back(static_cast<uint64_t>(4 * p11 / (10 * p10)));
      p11 *= 11;
      p10 *= 10;
    }
    if (long_->lows.empty()) long_->lows.push_back(1), per.push_back(0);
    long_->ranges.resize(long_->lows.size());
    for (size_t j = 0; j < long_->lows.size(); ++j) {
      uint64_t lo = long_->lows[j];
      uint64_t hi = j + 1 < long_->lows.size() ? long_->lows[j + 1] : n + 1;
      if (hi == lo || hi <= period_limit_) continue;
      auto r = std::make_unique<LongRuns::Range>();
      r->lo = lo;
      r->period = per[j];
      if (r->period > 0 && 2 * r->period <= lo) r->runs = enumerate_runs(tx, lo, r->period, lce);
      uint64_t cap = 2 * hi;
      std::vector<std::pair<uint64_t, uint64_t>> sp, sl, ep, el;
      for (const Run& run : r->runs) {
        uint64_t len = std::min(run.length(), cap);
        if (token_size(run.p) + token_size(len) > 61) r->zipped = false;
        sp.emplace_back(run.b, run.p);
        sl.emplace_back(run.b, len);
        ep.emplace_back(run.e - 1, run.p);
        el.emplace_back(run.e - 1, len);
      }
      r->start_per = senc_from_list(n, sp);
      r->start_len = senc_from_list(n, sl);
      r->end_per = senc_from_list(n, ep);
      r->end_len = senc_from_list(n, el);
      long_->ranges[j] = std::move(r);
    }
  }

  short_ = std::make_unique<ShortRuns>();
  uint64_t P = period_limit_;
  if (P >= 2 && n > 0) {
    for (int side = 0; side < 2; ++side) {
      bool ends = side == 1;
      // Blocks of P positions keyed by the symbols that decide their entries.
      std::unordered_map<std::string, std::vector<uint64_t>> memo;
      SencWriter w;
      for (uint64_t x = 0; x * P < n; ++x) {
        int64_t c0 = static_cast<int64_t>(x * P);
        int64_t from = ends ? c0 - static_cast<int64_t>(8 * P) : c0 - 1;
        int64_t to = ends ? c0 + static_cast<int64_t>(P) + 1 : c0 + static_cast<int64_t>(9 * P);
        std::string key;
        for (int64_t k = from; k < to; ++k) {
          uint32_t s = k < static_cast<int64_t>(n) ? tx.at(k) : tx.sentinel();
          key.append(reinterpret_cast<const char*>(&s), sizeof s);
        }
        uint64_t width = std::min<uint64_t>(P, n - x * P);
        key.push_back(static_cast<char>(width));
        auto it = memo.find(key);
        if (it == memo.end()) {
          std::vector<uint64_t> codes;
          for (uint64_t i = 0; i < width; ++i) {
            auto pairs = short_runs_at(tx, c0 + static_cast<int64_t>(i), P, ends);
            codes.push_back(pairs.empty() ? kNoRunEntry : entry_code(pairs));
          }
          it = memo.emplace(std::move(key), std::move(codes)).first;
        }
        for (uint64_t c : it->second) w.append_literal(c);
      }
      SparseEncoding r = w.finish();
      unsigned chain = ceil_lg(P);
      uint64_t table_size = std::min<uint64_t>(opt_.accel.table_n, uint64_t{1} << 20);
      for (unsigned j = 0; j < chain; ++j) {
        uint64_t min_len = 3 * (uint64_t{1} << j);
        auto filter = [j, min_len](uint64_t x) -> uint64_t {
          if (j == 0) return x == kNoRunEntry ? 0 : x;
          auto v = entry_values(x);
          if (!v || v->size() % 2) return 0;
          std::vector<uint64_t> keep;
          for (size_t k = 0; k + 1 < v->size(); k += 2)
            if ((*v)[k + 1] >= min_len) keep.insert(keep.end(), {(*v)[k], (*v)[k + 1]});
          return keep.empty() ? 0 : entry_code(keep);
        };
        auto table = std::make_shared<std::vector<uint64_t>>(table_size);
        for (uint64_t x = 0; x < table_size; ++x) (*table)[x] = filter(x);
        auto spec = single_state(1, [table, filter](State, std::span<const uint64_t> c) {
          return Step{0, c[0] < table->size() ? (*table)[c[0]] : filter(c[0])};
        });
        r = cache_->get("short-chain:" + std::to_string(j), spec)->run(r);
        short_->chains[side].push_back(r);
      }
    }
  }
}

FastSync::~FastSync() = default;

const SparseEncoding& FastSync::level(unsigned j) const {
  return levels_[std::min<size_t>(j, levels_.size() - 1)];
}

SparseEncoding FastSync::marker_long(uint64_t tau, uint64_t ell, bool ends) const {
  uint64_t n = this->n();
  uint64_t p = tau / 3;
  const auto& r = *long_->ranges[long_->find(tau)];
  if (uses_transducer(tau) && r.zipped) {
    auto spec = single_state(2, [ell, p](State, std::span<const uint64_t> c) {
      return Step{0, c[0] >= 1 && c[0] <= p && c[1] >= ell ? 1u : 0u};
    });
    std::vector<SparseEncoding> in{ends ? r.end_per : r.start_per, ends ? r.end_len : r.start_len};
    return cache_->run_multi("long:" + std::to_string(ell) + ":" + std::to_string(p), spec, in);
  }
  std::vector<uint64_t> pos;
  for (const Run& run : r.runs)
    if (run.length() >= ell && run.p <= p) pos.push_back(ends ? run.e - 1 : run.b);
  if (ends) std::sort(pos.begin(), pos.end());
  return senc_from_positions(n, pos);
}

SparseEncoding FastSync::marker_short(uint64_t tau, uint64_t ell, bool ends) const {
  uint64_t p = tau / 3;
  unsigned j = floor_lg(p);
  auto spec = single_state(1, [ell, p](State, std::span<const uint64_t> c) {
    auto v = entry_values(c[0]);
    uint64_t hit = 0;
    if (v)
      for (size_t k = 0; k + 1 < v->size(); k += 2)
        if ((*v)[k] >= 1 && (*v)[k] <= p && (*v)[k + 1] >= ell) hit = 1;
    return Step{0, hit};
  });
  auto h = cache_->get("short:" + std::to_string(ell) + ":" + std::to_string(p), spec);
  return h->run(short_->chains[ends ? 1 : 0][j]);
}

RunMarkers FastSync::run_markers(uint64_t tau, uint64_t ell) const {
  uint64_t n = this->n();
  if (tau < 1 || tau > n) throw std::invalid_argument("run_markers: tau must lie in [1..n]");
  if (ell < tau || ell > 2 * tau) throw std::invalid_argument("run_markers: ell must lie in [tau..2 tau]");
  uint64_t p = tau / 3;
  if (p == 0) {
    SparseEncoding z = senc_from_positions(n, {});
    return {z, z};
  }
  if (p < period_limit_) return {marker_short(tau, ell, false), marker_short(tau, ell, true)};
  return {marker_long(tau, ell, false), marker_long(tau, ell, true)};
}

void FastSync::check_tau(uint64_t tau) const {
  if (tau < 1 || 2 * tau > n())
    throw std::invalid_argument("tau must lie in [1..n/2], got " + std::to_string(tau));
}

SparseEncoding FastSync::sync_sparse(uint64_t tau) const {
  check_tau(tau);
  uint64_t n = this->n();
  if (!uses_transducer(tau)) {
    auto set = builder_->explicit_set(tau);
    return senc_from_positions(n, set);
  }
  AccelCache& c = *cache_;
  SparseEncoding b = shift_truncate(level(builder_->level_for(tau)), tau, c);
  RunMarkers one = run_markers(tau, tau);
  RunMarkers two = run_markers(tau, 2 * tau);
  std::vector<SparseEncoding> in{
      shift_truncate(one.starts, 1, c),
      shift_truncate(one.ends, 2 * tau - 2, c),
      two.starts,
      shift_truncate(two.ends, 2 * tau - 2, c),
      b,
  };
  TransducerSpec spec;
  spec.q = 2;
  spec.t = 5;
  spec.delta = [](State s, std::span<const uint64_t> x) {
    if (x[2]) return Step{1, 0};
    if (x[3]) return Step{0, 1};
    if (x[0] || x[1]) return Step{s, 1};
    if (s == 1) return Step{1, 0};
    return Step{0, x[4] ? 1u : 0u};
  };
  SparseEncoding m = c.run_multi("sync", spec, in);
  return senc_truncate_zero_tail(m, n - 2 * tau + 1);
}

SyncSetHandle FastSync::sync_with_support(uint64_t tau) const {
  SparseEncoding m = sync_sparse(tau);
  uint64_t n = this->n();
  uint64_t table_n = opt_.accel.table_n;
  uint64_t lg_big = std::max(1u, ceil_lg(std::max<uint64_t>(table_n, 2)));
  uint64_t lg_n = std::max(1u, ceil_lg(std::max<uint64_t>(n, 2)));
  uint64_t space = (m.stream.size() + lg_big - 1) / lg_big + (n * ceil_lg(tau) + tau * lg_n - 1) / (tau * lg_n);
  return SyncSetHandle(std::move(m), table_n, std::max<uint64_t>(space, 1));
}

SparseEncoding sync_sparse(const PackedText& t, uint64_t tau, FastPathOptions opt) {
  return FastSync(t, opt).sync_sparse(tau);
}

}  // namespace ssync
