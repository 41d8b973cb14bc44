#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ssync/bitstream.hpp"
#include "ssync/sparsecodec.hpp"
#include "ssync/text.hpp"

namespace ssync {

// Maximal periodic fragment T[b..e) with smallest period p <= (e - b) / 2.
struct Run {
  uint64_t b = 0;
  uint64_t e = 0;
  uint64_t p = 0;

  uint64_t length() const noexcept { return e - b; }
  bool operator==(const Run& o) const noexcept { return b == o.b && e == o.e && p == o.p; }
};

// Longest common extensions inside T[0..n).
class LceProvider {
 public:
  virtual ~LceProvider() = default;
  // Largest l with T[i..i+l) = T[j..j+l).
  virtual uint64_t forward(uint64_t i, uint64_t j) const = 0;
  // Largest l with T[i-l..i) = T[j-l..j).
  virtual uint64_t backward(uint64_t i, uint64_t j) const = 0;
};

// Symbol-by-symbol comparison.
class DirectLce : public LceProvider {
 public:
  explicit DirectLce(const PackedText& t) : t_(t) {}
  uint64_t forward(uint64_t i, uint64_t j) const override;
  uint64_t backward(uint64_t i, uint64_t j) const override;

 private:
  const PackedText& t_;
};

// Compares floor(64 / bits_per_symbol) symbols per step.
class PackedLce : public LceProvider {
 public:
  explicit PackedLce(const PackedText& t) : t_(t) {}
  uint64_t forward(uint64_t i, uint64_t j) const override;
  uint64_t backward(uint64_t i, uint64_t j) const override;

 private:
  const PackedText& t_;
};

// per(T[i..j)), 0 <= i < j <= n.
uint64_t period(const PackedText& t, uint64_t i, uint64_t j);

// The run containing T[i..j) with the same period, if T[i..j) is periodic.
std::optional<Run> run_extend(const PackedText& t, uint64_t i, uint64_t j, const LceProvider& lce);

// RUNS_{ell,p}: runs of length >= ell and period <= p, ordered by start and end.
std::vector<Run> enumerate_runs(const PackedText& t, uint64_t ell, uint64_t p, const LceProvider& lce);
std::vector<Run> enumerate_runs(const PackedText& t, uint64_t ell, uint64_t p);
// RUNS_{tau, floor(tau/3)}.
std::vector<Run> tau_runs(const PackedText& t, uint64_t tau, const LceProvider& lce);

// R_{ell,p}: bit i in [0..n-ell] set iff per(T[i..i+ell)) <= p. Length n-ell+1
// (empty when ell > n).
BitStream runs_bitmask(const PackedText& t, uint64_t ell, uint64_t p, uint64_t table_n = kDefaultTableN);
// Same set filled from the intervals [b..e-ell] of enumerate_runs (needs ell >= 2p).
BitStream runs_bitmask_from_runs(uint64_t n, uint64_t ell, const std::vector<Run>& runs);

}  // namespace ssync
