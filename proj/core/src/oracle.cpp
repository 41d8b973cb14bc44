#include "ssync/oracle.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <numeric>
#include <stdexcept>

namespace ssync::oracle {

using boost::multiprecision::cpp_int;

uint64_t smallest_period(std::span<const uint32_t> s) {
  if (s.empty()) throw std::invalid_argument("period of empty string");
  for (uint64_t p = 1; p < s.size(); ++p) {
    bool ok = true;
    for (uint64_t x = 0; x + p < s.size() && ok; ++x) ok = s[x] == s[x + p];
    if (ok) return p;
  }
  return s.size();
}

uint64_t primitive_root_length(std::span<const uint32_t> s) {
  uint64_t p = smallest_period(s);
  return s.size() % p == 0 ? p : s.size();
}

TextOracle::TextOracle(std::vector<uint32_t> text) : t_(std::move(text)) {
  uint64_t n = t_.size();
  if (n > 30000) throw std::invalid_argument("oracle text too long");
  per_.resize(n);
  std::vector<uint32_t> fail;
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t m = n - i;
    fail.assign(m + 1, 0);
    per_[i].resize(m);
    uint64_t k = 0;
    for (uint64_t L = 1; L < m; ++L) {
      while (k > 0 && t_[i + L] != t_[i + k]) k = fail[k];
      if (t_[i + L] == t_[i + k]) ++k;
      fail[L + 1] = static_cast<uint32_t>(k);
    }
    for (uint64_t L = 1; L <= m; ++L) per_[i][L - 1] = static_cast<uint16_t>(L - fail[L]);
  }
  sa_.resize(n);
  std::iota(sa_.begin(), sa_.end(), 0u);
  std::sort(sa_.begin(), sa_.end(), [&](uint32_t a, uint32_t b) {
    return std::lexicographical_compare(t_.begin() + a, t_.end(), t_.begin() + b, t_.end());
  });
  sa_lcp_.assign(n, 0);
  for (uint64_t r = 1; r < n; ++r) sa_lcp_[r] = static_cast<uint32_t>(lcp(sa_[r - 1], sa_[r]));
}

uint64_t TextOracle::lcp(uint64_t i, uint64_t j) const {
  uint64_t l = 0;
  while (i + l < t_.size() && j + l < t_.size() && t_[i + l] == t_[j + l]) ++l;
  return l;
}

std::vector<std::vector<uint64_t>> TextOracle::equal_fragments(uint64_t len) const {
  std::vector<std::vector<uint64_t>> groups;
  uint64_t n = t_.size();
  if (len > n) return groups;
  uint64_t run_min = UINT64_MAX;
  bool have = false;
  for (uint64_t r = 0; r < n; ++r) {
    if (r > 0) run_min = std::min<uint64_t>(run_min, sa_lcp_[r]);
    uint64_t s = sa_[r];
    if (n - s < len) continue;
    if (!have || run_min < len) groups.emplace_back();
    groups.back().push_back(s);
    have = true;
    run_min = UINT64_MAX;
  }
  return groups;
}

Report verify_sync(const TextOracle& t, uint64_t tau, std::span<const uint64_t> sync) {
  Report rep;
  uint64_t n = t.n();
  auto fail = [&](const char* cond, uint64_t pos, std::string detail) {
    if (rep.pass || pos < rep.position) {
      rep.pass = false;
      rep.condition = cond;
      rep.position = pos;
      rep.detail = std::move(detail);
    }
  };
  if (tau == 0 || 2 * tau > n) {
    fail("range", 0, "tau outside [1..n/2]");
    return rep;
  }
  std::vector<uint8_t> member(n, 0);
  for (size_t j = 0; j < sync.size(); ++j) {
    if (sync[j] > n - 2 * tau) {
      fail("range", sync[j], "member beyond n-2tau");
      return rep;
    }
    if (j > 0 && sync[j] <= sync[j - 1]) {
      fail("range", sync[j], "members not strictly increasing");
      return rep;
    }
    member[sync[j]] = 1;
  }
  for (const auto& g : t.equal_fragments(2 * tau)) {
    bool any = false, all = true;
    for (uint64_t s : g) {
      any |= member[s] != 0;
      all &= member[s] != 0;
    }
    if (any && !all) {
      uint64_t lo = *std::min_element(g.begin(), g.end());
      fail("consistency", lo, "matching contexts disagree on membership");
    }
  }
  if (!rep.pass) return rep;
  std::vector<uint64_t> pre(n + 1, 0);
  for (uint64_t i = 0; i < n; ++i) pre[i + 1] = pre[i] + member[i];
  uint64_t third = tau / 3;
  for (uint64_t i = 0; i + 3 * tau <= n + 1; ++i) {
    bool empty = pre[i + tau] == pre[i];
    bool periodic = t.period(i, 3 * tau - 1) <= third;
    if (empty != periodic) {
      fail("density", i, empty ? "empty window over an aperiodic fragment" : "member inside a periodic fragment");
      return rep;
    }
  }
  return rep;
}

Report verify_sync(const std::vector<uint32_t>& text, uint64_t tau, std::span<const uint64_t> sync) {
  return verify_sync(TextOracle(text), tau, sync);
}

namespace {

cpp_int pow_int(unsigned base, unsigned e) {
  cpp_int r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

Report verify_chain(const TextOracle& t, const std::vector<std::vector<uint64_t>>& levels) {
  Report rep;
  uint64_t n = t.n();
  auto fail = [&](const std::string& cond, uint64_t pos, std::string detail) {
    rep.pass = false;
    rep.condition = cond;
    rep.position = pos;
    rep.detail = std::move(detail);
    return rep;
  };
  if (levels.empty()) return fail("shape", 0, "no levels");
  for (uint64_t i = 1; i < n; ++i)
    if (levels[0].size() != n - 1 || levels[0][i - 1] != i) return fail("shape", i, "B_0 differs from [1..n)");
  if (n <= 1 && !levels[0].empty()) return fail("shape", 0, "B_0 not empty");
  if (!levels.back().empty()) return fail("shape", levels.size() - 1, "chain does not end empty");
  uint64_t alpha = 1;
  for (unsigned k = 0; k < levels.size(); ++k) {
    const auto& bk = levels[k];
    std::string lvl = "level " + std::to_string(k) + ": ";
    unsigned h = k / 2;
    cpp_int e8 = pow_int(8, h), e7 = pow_int(7, h);
    if (k > 0) {
      if (!std::includes(levels[k - 1].begin(), levels[k - 1].end(), bk.begin(), bk.end()))
        return fail(lvl + "descending", 0, "B_k not contained in B_{k-1}");
    }
    for (size_t j = 0; j < bk.size(); ++j) {
      if (bk[j] == 0 || bk[j] >= n || (j > 0 && bk[j] <= bk[j - 1]))
        return fail(lvl + "shape", bk[j], "positions not sorted inside [1..n)");
    }
    if (cpp_int(bk.size()) * e8 > cpp_int(n) * 4 * e7) return fail(lvl + "size", bk.size(), "|B_k| > 4n/lambda_k");
    std::vector<uint8_t> in(n + 1, 0);
    for (uint64_t p : bk) in[p] = 1;
    if (2 * alpha <= n) {
      for (const auto& g : t.equal_fragments(2 * alpha)) {
        bool any = false, all = true;
        for (uint64_t s : g) {
          any |= in[s + alpha] != 0;
          all &= in[s + alpha] != 0;
        }
        if (any && !all)
          return fail(lvl + "consistency", *std::min_element(g.begin(), g.end()) + alpha,
                      "matching contexts disagree");
      }
    }
    uint64_t prev = 0;
    for (size_t j = 0; j <= bk.size(); ++j) {
      uint64_t next = j < bk.size() ? bk[j] : n;
      uint64_t len = next - prev;
      if (len > 0) {
        bool short_enough = cpp_int(4 * len) * e7 <= cpp_int(7) * e8;
        uint64_t p = t.period(prev, len);
        uint64_t root = len % p == 0 ? p : len;
        bool root_ok = cpp_int(root) * e7 <= e8;
        if (!short_enough && !root_ok) return fail(lvl + "phrase", prev, "long phrase with long primitive root");
      }
      prev = next;
    }
    cpp_int fl = e8 / e7;
    alpha += static_cast<uint64_t>(fl);
  }
  return rep;
}

std::vector<BruteRun> brute_runs(const TextOracle& t, uint64_t ell, uint64_t p) {
  std::vector<BruteRun> out;
  uint64_t n = t.n();
  for (uint64_t i = 0; i < n; ++i) {
    for (uint64_t len = 2; i + len <= n; ++len) {
      uint64_t q = t.period(i, len);
      if (2 * q > len || q > p || len < ell) continue;
      if (i > 0 && t.period(i - 1, len + 1) == q) continue;
      if (i + len < n && t.period(i, len + 1) == q) continue;
      out.push_back({i, i + len, q});
    }
  }
  return out;
}

std::vector<bool> brute_periodic_mask(const TextOracle& t, uint64_t ell, uint64_t p) {
  std::vector<bool> m;
  if (ell == 0 || ell > t.n()) return m;
  for (uint64_t i = 0; i + ell <= t.n(); ++i) m.push_back(t.period(i, ell) <= p);
  return m;
}

RankSelect brute_rank_select(const std::vector<bool>& a) {
  RankSelect rs;
  rs.prefix.assign(a.size() + 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    rs.prefix[i + 1] = rs.prefix[i] + (a[i] ? 1 : 0);
    if (a[i]) rs.ones.push_back(i);
  }
  return rs;
}

uint64_t brute_rank(std::span<const uint64_t> sorted, uint64_t x) {
  uint64_t c = 0;
  for (uint64_t y : sorted) c += y < x;
  return c;
}

int64_t brute_pred(std::span<const uint64_t> sorted, uint64_t x) {
  int64_t best = -1;
  for (uint64_t y : sorted)
    if (y <= x) best = static_cast<int64_t>(y);
  return best;
}

}  // namespace ssync::oracle
