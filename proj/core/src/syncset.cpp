#include "ssync/syncset.hpp"

#include <algorithm>
#include <stdexcept>

#include "ssync/mathutil.hpp"

namespace ssync {

unsigned k_of_tau(uint64_t tau) { return schedule::k_of_tau(tau); }

namespace {

// Smallest integer x with 16 lambda_k <= x.
uint64_t ceil_sixteen_lambda(unsigned k) {
  uint64_t lo = 16, hi = 32;
  while (!schedule::scaled_lambda_at_most(k, 16, hi)) {
    lo = hi;
    if (hi > (uint64_t{1} << 62)) return UINT64_MAX;
    hi *= 2;
  }
  while (lo < hi) {
    uint64_t mid = lo + (hi - lo) / 2;
    if (schedule::scaled_lambda_at_most(k, 16, mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace

SyncBuilder::SyncBuilder(const PackedText& t, SyncOptions opt) : opt_(opt), rec_(t, opt.recompress) {
  lce_ = std::make_unique<PackedLce>(rec_.text());
  uint64_t n = std::max<uint64_t>(t.n(), 1);
  interval_start_.push_back(0);
  for (unsigned k = 1;; ++k) {
    uint64_t s = ceil_sixteen_lambda(k - 1);
    if (s > n) break;
    interval_start_.push_back(s);
  }
}

unsigned SyncBuilder::level_for(uint64_t tau) const {
  unsigned k = static_cast<unsigned>(interval_start_.size()) - 1;
  while (k > 0 && interval_start_[k] > tau) --k;
  return k;
}

void SyncBuilder::check_tau(uint64_t tau) const {
  if (tau < 1 || 2 * tau > text().n())
    throw std::invalid_argument("tau must lie in [1..n/2], got " + std::to_string(tau));
}

std::vector<uint64_t> SyncBuilder::explicit_set(uint64_t tau) const {
  check_tau(tau);
  const PackedText& t = text();
  uint64_t n = t.n();
  uint64_t last = n - 2 * tau;
  uint64_t p = tau / 3;
  std::vector<uint64_t> from_b;
  for (uint64_t f : rec_.bk_explicit(level_for(tau)))
    if (f >= tau && f - tau <= last) from_b.push_back(f - tau);
  std::vector<uint64_t> from_start, from_end;
  for (const Run& r : tau_runs(t, tau, *lce_)) {
    if (r.b >= 1 && r.b - 1 <= last) from_start.push_back(r.b - 1);
    if (r.e + 1 >= 2 * tau && r.e + 1 - 2 * tau <= last) from_end.push_back(r.e + 1 - 2 * tau);
  }
  std::vector<uint64_t> merged;
  merged.reserve(from_b.size() + from_start.size() + from_end.size());
  std::vector<uint64_t> tmp;
  std::merge(from_b.begin(), from_b.end(), from_start.begin(), from_start.end(), std::back_inserter(tmp));
  std::merge(tmp.begin(), tmp.end(), from_end.begin(), from_end.end(), std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  // Drop positions whose 2tau-context has period <= floor(tau/3).
  std::vector<uint64_t> out;
  out.reserve(merged.size());
  std::vector<Run> periodic = p == 0 ? std::vector<Run>{} : enumerate_runs(t, 2 * tau, p, *lce_);
  size_t r = 0;
  for (uint64_t i : merged) {
    while (r < periodic.size() && periodic[r].e < i + 2 * tau) ++r;
    bool covered = r < periodic.size() && periodic[r].b <= i;
    if (!covered) out.push_back(i);
  }
  return out;
}

bool SyncBuilder::combines_masks(uint64_t tau) const {
  if (opt_.combine_masks >= 0) return opt_.combine_masks == 1;
  unsigned budget = floor_lg(std::max<uint64_t>(opt_.recompress.table_n, 2));
  return 2 * tau * text().bits_per_symbol() <= budget;
}

BitStream SyncBuilder::bitmask(uint64_t tau) const {
  check_tau(tau);
  uint64_t n = text().n();
  if (!combines_masks(tau)) {
    BitStream m = BitStream::zeros(n);
    for (uint64_t i : explicit_set(tau)) m.set(i);
    return m;
  }
  uint64_t p = tau / 3;
  uint64_t table_n = opt_.recompress.table_n;
  BitStream r1 = runs_bitmask(text(), tau, p, table_n);
  BitStream r2 = runs_bitmask(text(), 2 * tau, p, table_n);
  BitStream bk = rec_.bk_bitmask(level_for(tau));
  BitStream aperiodic = bit_not(fit(r2, n, true));
  BitStream boundary = shift_down(bk, tau, n, false);
  BitStream starts = bit_and(bit_not(shift_down(r1, 0, n, true)), shift_down(r1, 1, n, false));
  BitStream ends = bit_and(bit_not(shift_down(r1, tau, n, true)), shift_down(r1, tau - 1, n, false));
  return bit_and(aperiodic, bit_or(boundary, bit_or(starts, ends)));
}

std::vector<uint64_t> build_sync_explicit(const PackedText& t, uint64_t tau, SyncOptions opt) {
  return SyncBuilder(t, opt).explicit_set(tau);
}

BitStream build_sync_bitmask(const PackedText& t, uint64_t tau, SyncOptions opt) {
  return SyncBuilder(t, opt).bitmask(tau);
}

}  // namespace ssync
