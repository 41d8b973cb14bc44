#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ssync/sparsecodec.hpp"

namespace ssync {

// Plain bit vector with rank and select over its one bits.
class BitRankSelect {
 public:
  BitRankSelect() = default;
  explicit BitRankSelect(BitStream bits);

  uint64_t size() const noexcept { return bits_.size(); }
  uint64_t ones() const noexcept { return total_; }
  // Ones in [0..i).
  uint64_t rank(uint64_t i) const;
  // Position of the j-th one, j in [1..ones()].
  uint64_t select(uint64_t j) const;

 private:
  BitStream bits_;
  std::vector<uint64_t> block_rank_;  // ones before each 512-bit block
  std::vector<uint64_t> samples_;     // block holding every 512th one
  uint64_t total_ = 0;
};

struct Piece {
  uint64_t p;  // first decoded position
  uint64_t e;  // first encoding bit
  uint64_t r;  // ones before p
};

// Greedy split of senc(A) into windows of at most ceil(lg N) bits and long
// zero-run tokens. pieces()[h] is the sentinel (n, |senc A|, popcount).
class Decomposition {
 public:
  Decomposition(const SparseEncoding& mask, uint64_t table_n = kDefaultTableN);

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  uint64_t h() const noexcept { return pieces_.size() - 1; }
  unsigned window() const noexcept { return ell_; }
  const SparseEncoding& encoding() const noexcept { return *enc_; }
  bool all_zero(uint64_t i) const { return pieces_[i + 1].r == pieces_[i].r; }
  // rank_A(j) for j in [p_i..p_{i+1}).
  uint64_t rank_in(uint64_t i, uint64_t j) const;
  // select_A(j) for j in (r_i..r_{i+1}].
  uint64_t select_in(uint64_t i, uint64_t j) const;
  // Literal-start mask restricted to piece i.
  uint64_t literal_starts(uint64_t i) const;

 private:
  ParseInfo parse_piece(uint64_t i) const;

  std::shared_ptr<const SparseEncoding> enc_;
  std::shared_ptr<const ParseTable> table_;
  unsigned ell_;
  std::vector<Piece> pieces_;
};

class SelectSupport {
 public:
  SelectSupport(const SparseEncoding& mask, uint64_t table_n = kDefaultTableN);
  explicit SelectSupport(std::shared_ptr<const Decomposition> d);

  uint64_t ones() const noexcept { return dec_->pieces().back().r; }
  uint64_t select(uint64_t j) const;
  const Decomposition& decomposition() const noexcept { return *dec_; }

 private:
  void build();

  std::shared_ptr<const Decomposition> dec_;
  BitRankSelect literal_;   // C: starts of literal tokens
  BitRankSelect boundary_;  // B: piece starts e_i
};

// Deterministic predecessor structure over strictly increasing keys below 2^bits.
class VebIndex {
 public:
  VebIndex() = default;
  // space is the parameter m (clamped to at least |keys|); word the simulated
  // word width w; table_n bounds direct-address child tables.
  VebIndex(std::vector<uint64_t> keys, unsigned bits, uint64_t space, unsigned word,
           uint64_t table_n = kDefaultTableN);

  uint64_t size() const noexcept { return keys_.size(); }
  // |{y in S : y < x}|
  uint64_t rank(uint64_t x) const;
  // max {y in S : y <= x}, or nullopt for minus infinity.
  std::optional<uint64_t> pred(uint64_t x) const;
  // |{y in S : y <= x}|
  uint64_t count_le(uint64_t x) const;
  unsigned depth() const noexcept { return depth_; }

  struct Node;

 private:
  std::vector<uint64_t> keys_;
  std::vector<uint64_t> sampled_;
  uint64_t stride_ = 1;
  unsigned bits_ = 0;
  unsigned depth_ = 0;
  std::shared_ptr<const Node> root_;
};

class RankSupport {
 public:
  // m >= |senc A| / lg N; 0 picks that bound.
  RankSupport(const SparseEncoding& mask, uint64_t table_n = kDefaultTableN, uint64_t m = 0);
  explicit RankSupport(std::shared_ptr<const Decomposition> d, uint64_t m = 0);

  uint64_t n() const noexcept { return dec_->pieces().back().p; }
  // Ones in A[0..j), j in [0..n].
  uint64_t rank(uint64_t j) const;
  const VebIndex& index() const noexcept { return veb_; }

 private:
  void build(uint64_t m);

  std::shared_ptr<const Decomposition> dec_;
  VebIndex veb_;
};

// Rank, select and predecessor on one sparse mask.
class SparseMaskSupport {
 public:
  SparseMaskSupport(const SparseEncoding& mask, uint64_t table_n = kDefaultTableN, uint64_t m = 0);

  uint64_t n() const noexcept { return rank_.n(); }
  uint64_t ones() const noexcept { return select_.ones(); }
  uint64_t rank(uint64_t j) const { return rank_.rank(j); }
  uint64_t select(uint64_t j) const { return select_.select(j); }
  // Largest set position <= j.
  std::optional<uint64_t> pred(uint64_t j) const;

 private:
  std::shared_ptr<const Decomposition> dec_;
  SelectSupport select_;
  RankSupport rank_;
};

}  // namespace ssync
