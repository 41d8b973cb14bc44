#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ssync/bitstream.hpp"

// Brute-force references. Nothing here depends on the optimized modules.
namespace ssync::oracle {

struct Report {
  bool pass = true;
  std::string condition;  // which check failed
  uint64_t position = 0;  // smallest offending position
  std::string detail;

  explicit operator bool() const noexcept { return pass; }
};

uint64_t smallest_period(std::span<const uint32_t> s);
uint64_t primitive_root_length(std::span<const uint32_t> s);

// Per-text tables: smallest period of every fragment and a suffix array.
class TextOracle {
 public:
  explicit TextOracle(std::vector<uint32_t> text);

  uint64_t n() const noexcept { return t_.size(); }
  const std::vector<uint32_t>& text() const noexcept { return t_; }
  // per(T[i..i+len)), len >= 1.
  uint64_t period(uint64_t i, uint64_t len) const { return per_[i][len - 1]; }
  // Longest common prefix of the suffixes at i and j.
  uint64_t lcp(uint64_t i, uint64_t j) const;
  const std::vector<uint32_t>& suffix_array() const noexcept { return sa_; }
  // Groups of positions s in [0..n-len] whose length-len fragments match.
  std::vector<std::vector<uint64_t>> equal_fragments(uint64_t len) const;

 private:
  std::vector<uint32_t> t_;
  std::vector<std::vector<uint16_t>> per_;
  std::vector<uint32_t> sa_;
  std::vector<uint32_t> sa_lcp_;
};

Report verify_sync(const TextOracle& t, uint64_t tau, std::span<const uint64_t> sync);
Report verify_sync(const std::vector<uint32_t>& text, uint64_t tau, std::span<const uint64_t> sync);

// Checks B_0 = [1..n), the descending chain, the size bound, context
// consistency and the phrase condition at every level.
Report verify_chain(const TextOracle& t, const std::vector<std::vector<uint64_t>>& levels);

struct BruteRun {
  uint64_t b, e, p;
  bool operator==(const BruteRun& o) const { return b == o.b && e == o.e && p == o.p; }
};
// All runs T[b..e) with e - b >= ell and period <= p, sorted by start.
std::vector<BruteRun> brute_runs(const TextOracle& t, uint64_t ell, uint64_t p);
// Bit i set iff per(T[i..i+ell)) <= p.
std::vector<bool> brute_periodic_mask(const TextOracle& t, uint64_t ell, uint64_t p);

struct RankSelect {
  std::vector<uint64_t> prefix;  // prefix[j] = ones in A[0..j)
  std::vector<uint64_t> ones;    // positions of ones
  uint64_t rank(uint64_t j) const { return prefix[j]; }
  uint64_t select(uint64_t j) const { return ones[j - 1]; }
};
RankSelect brute_rank_select(const std::vector<bool>& a);

// Number of keys < x and largest key <= x (-1 when none).
uint64_t brute_rank(std::span<const uint64_t> sorted, uint64_t x);
int64_t brute_pred(std::span<const uint64_t> sorted, uint64_t x);

// Runs a deterministic transducer step by step. step(state, column) returns
// {next state, output}.
template <class Step>
std::vector<uint64_t> run_reference_transducer(uint32_t s0, Step step,
                                               const std::vector<std::vector<uint64_t>>& inputs) {
  std::vector<uint64_t> out;
  if (inputs.empty()) return out;
  uint64_t n = inputs[0].size();
  out.reserve(n);
  uint32_t s = s0;
  std::vector<uint64_t> col(inputs.size());
  for (uint64_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < inputs.size(); ++j) col[j] = inputs[j][i];
    auto [next, y] = step(s, std::span<const uint64_t>(col));
    s = next;
    out.push_back(y);
  }
  return out;
}

}  // namespace ssync::oracle
