#include "ssync/runs.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "ssync/mathutil.hpp"
#include "ssync/recompress.hpp"

namespace ssync {

uint64_t DirectLce::forward(uint64_t i, uint64_t j) const {
  const auto& s = t_.symbols();
  uint64_t n = s.size(), l = 0;
  while (i + l < n && j + l < n && s[i + l] == s[j + l]) ++l;
  return l;
}

uint64_t DirectLce::backward(uint64_t i, uint64_t j) const {
  const auto& s = t_.symbols();
  uint64_t l = 0, cap = std::min(i, j);
  while (l < cap && s[i - l - 1] == s[j - l - 1]) ++l;
  return l;
}

uint64_t PackedLce::forward(uint64_t i, uint64_t j) const {
  uint64_t n = t_.n();
  if (i >= n || j >= n) return 0;
  uint64_t cap = n - std::max(i, j);
  unsigned bps = t_.bits_per_symbol();
  unsigned step = 64 / bps;
  uint64_t l = 0;
  while (l < cap) {
    unsigned c = static_cast<unsigned>(std::min<uint64_t>(step, cap - l));
    uint64_t x = t_.extract(static_cast<int64_t>(i + l), c) ^ t_.extract(static_cast<int64_t>(j + l), c);
    if (x) return l + static_cast<uint64_t>(std::countr_zero(x)) / bps;
    l += c;
  }
  return cap;
}

uint64_t PackedLce::backward(uint64_t i, uint64_t j) const {
  uint64_t cap = std::min(i, j);
  unsigned bps = t_.bits_per_symbol();
  unsigned step = 64 / bps;
  uint64_t l = 0;
  while (l < cap) {
    unsigned c = static_cast<unsigned>(std::min<uint64_t>(step, cap - l));
    uint64_t x = t_.extract(static_cast<int64_t>(i - l - c), c) ^ t_.extract(static_cast<int64_t>(j - l - c), c);
    if (x) return l + (c - 1 - floor_lg(x) / bps);
    l += c;
  }
  return cap;
}

uint64_t period(const PackedText& t, uint64_t i, uint64_t j) {
  if (i >= j || j > t.n()) throw std::invalid_argument("period: empty or out-of-range fragment");
  const auto& s = t.symbols();
  uint64_t m = j - i;
  std::vector<uint64_t> fail(m + 1, 0);
  uint64_t k = 0;
  for (uint64_t x = 1; x < m; ++x) {
    while (k > 0 && s[i + x] != s[i + k]) k = fail[k];
    if (s[i + x] == s[i + k]) ++k;
    fail[x + 1] = k;
  }
  return m - fail[m];
}

std::optional<Run> run_extend(const PackedText& t, uint64_t i, uint64_t j, const LceProvider& lce) {
  uint64_t p = period(t, i, j);
  if (2 * p > j - i) return std::nullopt;
  uint64_t e = j + lce.forward(j, j - p);
  uint64_t b = i - lce.backward(i, i + p);
  return Run{b, e, p};
}

std::vector<Run> enumerate_runs(const PackedText& t, uint64_t ell, uint64_t p, const LceProvider& lce) {
  if (ell < 2 * p) throw std::invalid_argument("enumerate_runs: ell < 2p");
  std::vector<Run> out;
  uint64_t n = t.n();
  if (p == 0 || 2 * p > n) return out;
  uint64_t delta = ell + 1 - 2 * p;
  std::optional<Run> prev;
  for (uint64_t i = 0; i * delta + 2 * p <= n; ++i) {
    uint64_t s = i * delta;
    std::optional<Run> g;
    // A probe inside the previous run with matching period extends to that run.
    if (prev && prev->b <= s && s + 2 * p <= prev->e && period(t, s, s + 2 * p) == prev->p)
      g = prev;
    else
      g = run_extend(t, s, s + 2 * p, lce);
    if (g && g->length() >= ell && g->p <= p && !(prev && *g == *prev)) out.push_back(*g);
    if (g) prev = g;
  }
  return out;
}

std::vector<Run> enumerate_runs(const PackedText& t, uint64_t ell, uint64_t p) {
  PackedLce lce(t);
  return enumerate_runs(t, ell, p, lce);
}

std::vector<Run> tau_runs(const PackedText& t, uint64_t tau, const LceProvider& lce) {
  return enumerate_runs(t, tau, tau / 3, lce);
}

BitStream runs_bitmask_from_runs(uint64_t n, uint64_t ell, const std::vector<Run>& runs) {
  if (ell > n) return {};
  BitStream m = BitStream::zeros(n - ell + 1);
  for (const Run& r : runs)
    for (uint64_t i = r.b; i + ell <= r.e; ++i) m.set(i);
  return m;
}

namespace {

// Does the packed string of length ell have a period q <= p?
bool has_small_period(uint64_t content, unsigned ell, unsigned bps, uint64_t p) {
  for (uint64_t q = 1; q <= p && q < ell; ++q) {
    uint64_t keep = low_bits(static_cast<unsigned>((ell - q) * bps));
    if (((content ^ (content >> (q * bps))) & keep) == 0) return true;
  }
  return p >= ell;
}

}  // namespace

BitStream runs_bitmask(const PackedText& t, uint64_t ell, uint64_t p, uint64_t table_n) {
  uint64_t n = t.n();
  if (ell == 0) throw std::invalid_argument("runs_bitmask: ell must be positive");
  if (ell > n) return {};
  if (p == 0) return BitStream::zeros(n - ell + 1);
  unsigned bps = t.bits_per_symbol();
  if (ell * bps <= floor_lg(std::max<uint64_t>(table_n, 2)) && 2 * ell * bps <= 64) {
    unsigned L = static_cast<unsigned>(ell);
    BitStream dict = BitStream::zeros(uint64_t{1} << (L * bps));
    for (uint64_t c = 0; c < dict.size(); ++c)
      if (has_small_period(c, L, bps, p)) dict.set(c);
    return context_to_bitmask(t.padded(0), n, bps, L, [&](uint64_t c) { return dict.get(c); });
  }
  if (ell >= 2 * p) return runs_bitmask_from_runs(n, ell, enumerate_runs(t, ell, p));
  BitStream m = BitStream::zeros(n - ell + 1);
  for (uint64_t i = 0; i + ell <= n; ++i)
    if (period(t, i, i + ell) <= p) m.set(i);
  return m;
}

}  // namespace ssync
