#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ssync/bitstream.hpp"
#include "ssync/text.hpp"

namespace ssync {

// Phrase-length schedule lambda_k = (8/7)^floor(k/2) and context radii alpha_k.
// All comparisons against lambda_k are exact.
namespace schedule {

// floor(lambda_k), saturating at 2^62.
uint64_t floor_lambda(unsigned k);
// alpha_0 = 1, alpha_k = alpha_{k-1} + floor(lambda_{k-1}), saturating.
uint64_t alpha(unsigned k);
// True iff lambda_k > x.
bool lambda_exceeds(unsigned k, uint64_t x);
// True iff count <= 4n / lambda_k.
bool within_size_bound(unsigned k, uint64_t count, uint64_t n);
// True iff c * lambda_k <= x.
bool scaled_lambda_at_most(unsigned k, uint64_t c, uint64_t x);
// max{ j : j = 0 or 16 lambda_{j-1} <= tau }.
unsigned k_of_tau(uint64_t tau);
// Smallest k with lambda_k > 4n; every level from there on is empty.
unsigned empty_level_bound(uint64_t n);
double lambda_value(unsigned k);

}  // namespace schedule

struct DicutEdge {
  uint32_t from;
  uint32_t to;
  uint64_t weight;
};

// Greedy derandomized directed cut. Nodes are placed in id order on the side
// with the larger conditional expectation of L->R weight; ties go to L.
// Returns in_left[v] for every node v.
std::vector<bool> max_dicut(uint32_t nodes, std::span<const DicutEdge> edges);
uint64_t cut_weight(std::span<const DicutEdge> edges, const std::vector<bool>& in_left);

// Boundary sets B_0 ⊇ B_1 ⊇ ... ⊇ B_q = ∅ as sorted position lists.
struct BoundaryChain {
  uint64_t n = 0;
  std::vector<std::vector<uint64_t>> levels;

  // Number of levels up to and including the first empty one.
  unsigned depth() const noexcept { return static_cast<unsigned>(levels.size()); }
  const std::vector<uint64_t>& level(unsigned k) const;
};

// Names of the phrases induced by a boundary list: equal names iff equal
// strings; names ordered by (length, lexicographic content).
struct PhraseNames {
  std::vector<uint64_t> names;
  std::vector<uint64_t> lengths;
};
PhraseNames phrase_names(const PackedText& t, std::span<const uint64_t> bk);

// One round of restricted recompression, B_k -> B_{k+1}.
std::vector<uint64_t> round_even(const PackedText& t, std::span<const uint64_t> bk, unsigned k);
std::vector<uint64_t> round_odd(const PackedText& t, std::span<const uint64_t> bk, unsigned k);
std::vector<uint64_t> advance_round(const PackedText& t, std::span<const uint64_t> bk, unsigned k);

BoundaryChain build_chain_linear(const PackedText& t);

// Bit i set iff the length-ell string of `seq` at i is accepted by `member`.
// Strings are passed as packed content (first symbol in the low bits).
BitStream context_to_bitmask(const BitStream& seq, uint64_t count, unsigned bps, unsigned ell,
                             const std::function<bool(uint64_t)>& member);
std::vector<uint64_t> bitmask_to_list(const BitStream& m);

struct RecompressOptions {
  uint64_t table_n = kDefaultTableN;
  // The packed rounds run only when log_sigma(n) >= this threshold.
  double fallback_threshold = 256.0;
};

// Context sets C_0..C_K as bitmasks over packed length-2 alpha_k contents.
class ContextSets {
 public:
  ContextSets(const PackedText& t, unsigned K, uint64_t table_n);

  unsigned K() const noexcept { return K_; }
  bool contains(unsigned k, uint64_t content) const { return sets_[k].get(content); }
  const BitStream& set(unsigned k) const { return sets_[k]; }

 private:
  unsigned K_;
  std::vector<BitStream> sets_;
};

// Preprocessed text answering B_k queries in list or bitmask form.
class Recompressor {
 public:
  explicit Recompressor(const PackedText& t, RecompressOptions opt = {});

  const PackedText& text() const noexcept { return text_; }
  bool packed() const noexcept { return packed_; }
  // Number of packed rounds (meaningful only when packed()).
  unsigned K() const noexcept { return K_; }
  const ContextSets* contexts() const noexcept { return ctx_.get(); }
  // Level index of the first empty set.
  unsigned q() const noexcept { return q_; }

  // n-bit mask of B_k (bit 0 is always clear).
  BitStream bk_bitmask(unsigned k) const;
  std::vector<uint64_t> bk_explicit(unsigned k) const;
  BoundaryChain chain() const;

  static int packed_rounds(const PackedText& t, const RecompressOptions& opt);

 private:
  PackedText text_;
  RecompressOptions opt_;
  bool packed_ = false;
  unsigned K_ = 0;
  unsigned q_ = 0;
  std::shared_ptr<ContextSets> ctx_;
  // Explicit levels: all of them on the linear path, levels >= K on the packed path.
  std::vector<std::vector<uint64_t>> levels_;
  unsigned first_stored_ = 0;
};

}  // namespace ssync
