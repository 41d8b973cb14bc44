#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "ssync/oracle.hpp"
#include "ssync/recompress.hpp"

using namespace ssync;

namespace {

PackedText make(const std::vector<uint32_t>& raw, uint64_t sigma) { return PackedText::from_symbols(raw, sigma); }

std::vector<uint64_t> all_positions(uint64_t n) {
  std::vector<uint64_t> v;
  for (uint64_t i = 1; i < n; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST(Schedule, AlphaAndLambda) {
  EXPECT_EQ(schedule::alpha(0), 1u);
  EXPECT_EQ(schedule::alpha(1), 2u);
  EXPECT_EQ(schedule::alpha(2), 3u);
  EXPECT_EQ(schedule::alpha(3), 4u);
  EXPECT_EQ(schedule::floor_lambda(0), 1u);
  EXPECT_EQ(schedule::floor_lambda(5), 1u);  // (8/7)^2
  EXPECT_EQ(schedule::floor_lambda(10), 1u);  // (8/7)^5 = 1.95
  EXPECT_EQ(schedule::floor_lambda(12), 2u);  // (8/7)^6 = 2.23
  for (unsigned k = 0; k < 300; ++k) {
    uint64_t f = schedule::floor_lambda(k);
    if (f >= (uint64_t{1} << 58)) break;
    ASSERT_FALSE(schedule::lambda_exceeds(k, f + 1)) << k;
    ASSERT_EQ(schedule::lambda_exceeds(k, f), k >= 2) << k;
    if (k < 200) ASSERT_EQ(f, static_cast<uint64_t>(schedule::lambda_value(k))) << k;
  }
}

TEST(Schedule, AlphaBoundedBySixteenLambda) {
  // alpha(k+1) <= 16 lambda_k  <=>  not (16 lambda_k < alpha(k+1)).
  for (unsigned k = 0; k < 200; ++k) {
    uint64_t a = schedule::alpha(k + 1);
    if (a >= (uint64_t{1} << 58)) break;
    // 16 lambda_k >= a  <=>  lambda_k > (a - 1) / 16 fails only when 16 lambda_k < a.
    bool ok = !schedule::scaled_lambda_at_most(k, 16, a - 1) || schedule::scaled_lambda_at_most(k, 16, a);
    ASSERT_TRUE(ok) << k;
    ASSERT_LE(static_cast<double>(a), 16 * schedule::lambda_value(k) + 1e-9) << k;
  }
}

TEST(Schedule, KOfTau) {
  EXPECT_EQ(schedule::k_of_tau(1), 0u);
  EXPECT_EQ(schedule::k_of_tau(15), 0u);
  EXPECT_EQ(schedule::k_of_tau(16), 2u);
  EXPECT_EQ(schedule::k_of_tau(18), 2u);
  EXPECT_EQ(schedule::k_of_tau(19), 4u);
  unsigned prev = 0;
  for (uint64_t tau = 1; tau < 100000; tau += 1 + tau / 50) {
    unsigned k = schedule::k_of_tau(tau);
    ASSERT_GE(k, prev);
    prev = k;
    // Maximality: 16 lambda_k > tau.
    ASSERT_FALSE(schedule::scaled_lambda_at_most(k, 16, tau));
  }
}

TEST(Schedule, EmptyLevelBound) {
  for (uint64_t n : {1ull, 2ull, 100ull, 1ull << 20}) {
    unsigned k = schedule::empty_level_bound(n);
    EXPECT_TRUE(schedule::lambda_exceeds(k, 4 * n));
    if (k > 0) EXPECT_FALSE(schedule::lambda_exceeds(k - 1, 4 * n));
  }
}

TEST(MaxDicut, SingleEdge) {
  std::vector<DicutEdge> e = {{0, 1, 1}};
  auto l = max_dicut(2, e);
  EXPECT_TRUE(l[0]);
  EXPECT_FALSE(l[1]);
  EXPECT_EQ(cut_weight(e, l), 1u);
}

TEST(MaxDicut, AntiparallelPair) {
  std::vector<DicutEdge> e = {{0, 1, 1}, {1, 0, 1}};
  EXPECT_GE(cut_weight(e, max_dicut(2, e)), 1u);
}

TEST(MaxDicut, FigureGraph) {
  // A=0 .. E=4; the multigraph has 11 edges.
  std::vector<DicutEdge> e = {{0, 1, 2}, {0, 2, 1}, {1, 0, 1}, {1, 2, 1}, {2, 3, 2},
                              {2, 4, 1}, {3, 2, 1}, {4, 0, 1}, {4, 1, 1}};
  uint64_t total = 0;
  for (auto& d : e) total += d.weight;
  EXPECT_EQ(total, 11u);
  uint64_t w = cut_weight(e, max_dicut(5, e));
  EXPECT_GE(4 * w, total);
  EXPECT_GE(w, 3u);
}

TEST(MaxDicut, QuarterBoundRandom) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 2000; ++it) {
    uint32_t nodes = 1 + rng() % 12;
    std::vector<DicutEdge> e;
    uint64_t total = 0;
    for (int j = rng() % 30; j > 0; --j) {
      uint32_t a = rng() % nodes, b = rng() % nodes;
      if (a == b) continue;
      e.push_back({a, b, 1 + rng() % 5});
      total += e.back().weight;
    }
    auto l = max_dicut(nodes, e);
    ASSERT_GE(4 * cut_weight(e, l), total);
    ASSERT_EQ(l, max_dicut(nodes, e));
  }
}

TEST(Rounds, EvenRoundMergesEqualRun) {
  std::vector<uint32_t> raw = {0, 0, 0, 1};
  PackedText t = make(raw, 2);
  auto b0 = all_positions(4);
  EXPECT_EQ(round_even(t, b0, 0), (std::vector<uint64_t>{3}));
}

TEST(Rounds, EvenRoundKeepsDistinct) {
  std::vector<uint32_t> raw = {0, 1, 2, 3, 4, 5};
  PackedText t = make(raw, 6);
  auto b0 = all_positions(6);
  EXPECT_EQ(round_even(t, b0, 0), b0);
}

TEST(Rounds, OddRoundWithoutShortPairsKeepsAll) {
  std::vector<uint32_t> raw(40, 0);
  raw[20] = 1;
  PackedText t = make(raw, 2);
  std::vector<uint64_t> bk = {20, 21};
  EXPECT_EQ(round_odd(t, bk, 1), bk);
}

TEST(Rounds, PhraseNamesCanonical) {
  std::vector<uint32_t> raw = {1, 0, 1, 1, 0, 0};
  PackedText t = make(raw, 2);
  std::vector<uint64_t> bk = {1, 2, 4};
  auto pn = phrase_names(t, bk);
  // Phrases: "1", "0", "11", "00" -> ordered by (length, content).
  EXPECT_EQ(pn.lengths, (std::vector<uint64_t>{1, 1, 2, 2}));
  EXPECT_EQ(pn.names, (std::vector<uint64_t>{1, 0, 3, 2}));
}

TEST(Chain, TinyTexts) {
  EXPECT_EQ(build_chain_linear(make({}, 2)).levels.size(), 1u);
  auto c1 = build_chain_linear(make({0}, 2));
  ASSERT_EQ(c1.levels.size(), 1u);
  EXPECT_TRUE(c1.levels[0].empty());
}

TEST(Chain, UnaryTextCollapses) {
  std::vector<uint32_t> raw(300, 0);
  PackedText t = make(raw, 1);
  auto c = build_chain_linear(t);
  ASSERT_GE(c.levels.size(), 2u);
  EXPECT_LE(c.levels[1].size(), 1u);
  oracle::TextOracle o(raw);
  EXPECT_TRUE(oracle::verify_chain(o, c.levels).pass);
}

TEST(Chain, OracleOnCorpus) {
  auto corpus = corpus::make_corpus(101, 150, 512);
  for (const auto& c : corpus) {
    PackedText t = make(c.text, c.sigma);
    auto chain = build_chain_linear(t);
    oracle::TextOracle o(c.text);
    auto rep = oracle::verify_chain(o, chain.levels);
    ASSERT_TRUE(rep.pass) << c.kind << " n=" << c.text.size() << " " << rep.condition << " " << rep.detail;
    for (unsigned k = 0; k < chain.levels.size(); ++k)
      ASSERT_TRUE(schedule::within_size_bound(k, chain.levels[k].size(), c.text.size()));
  }
}

TEST(Chain, DeletedBoundaryIsCaught) {
  std::mt19937_64 rng(7);
  int caught = 0;
  for (int it = 0; it < 40; ++it) {
    auto raw = corpus::random_text(rng, 64 + rng() % 64, 2);
    auto chain = build_chain_linear(make(raw, 2));
    // Remove a boundary from the deepest non-empty level and its successors.
    unsigned k = static_cast<unsigned>(chain.levels.size()) - 2;
    if (chain.levels[k].empty()) continue;
    uint64_t victim = chain.levels[k][rng() % chain.levels[k].size()];
    for (auto& lvl : chain.levels) std::erase(lvl, victim);
    oracle::TextOracle o(raw);
    caught += !oracle::verify_chain(o, chain.levels).pass;
  }
  EXPECT_GT(caught, 0);
}

TEST(Bitmask, ContextToBitmaskAgainstScan) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    uint64_t n = 1 + rng() % 300;
    auto raw = corpus::random_text(rng, n, 4);
    PackedText t = make(raw, 4);
    unsigned bps = t.bits_per_symbol();
    unsigned ell = 1 + static_cast<unsigned>(rng() % 6);
    uint64_t salt = rng();
    int mode = it % 3;
    auto member = [&](uint64_t c) {
      if (mode == 0) return true;
      if (mode == 1) return false;
      return ((c * 0x9E3779B97F4A7C15ull) ^ salt) % 3 == 0;
    };
    BitStream m = context_to_bitmask(t.padded(0), n, bps, ell, member);
    ASSERT_EQ(m.size(), n >= ell ? n - ell + 1 : 0) << n << " " << ell;
    for (uint64_t i = 0; i + ell <= n; ++i) ASSERT_EQ(m.get(i), member(t.extract(static_cast<int64_t>(i), ell)));
  }
}

TEST(Bitmask, ToList) {
  EXPECT_EQ(bitmask_to_list(BitStream::from_string("0101")), (std::vector<uint64_t>{1, 3}));
  EXPECT_TRUE(bitmask_to_list(BitStream::zeros(100)).empty());
  std::mt19937_64 rng(13);
  for (int it = 0; it < 100; ++it) {
    BitStream m;
    std::vector<uint64_t> expect;
    uint64_t n = rng() % 1000;
    for (uint64_t i = 0; i < n; ++i) {
      bool b = rng() % 7 == 0;
      m.append_bit(b);
      if (b) expect.push_back(i);
    }
    ASSERT_EQ(bitmask_to_list(m), expect);
  }
}

TEST(Recompressor, PackedMatchesLinear) {
  auto corpus = corpus::make_corpus(202, 200, 512);
  int packed_runs = 0;
  for (const auto& c : corpus) {
    if (c.sigma > 4) continue;
    PackedText t = make(c.text, c.sigma);
    auto linear = build_chain_linear(t);
    for (uint64_t tn : {uint64_t{1} << 16, uint64_t{1} << 20}) {
      Recompressor r(t, RecompressOptions{tn, 0.01});
      if (!r.packed()) continue;
      ++packed_runs;
      auto chain = r.chain();
      ASSERT_EQ(chain.levels, linear.levels) << c.kind << " n=" << c.text.size() << " K=" << r.K();
      for (unsigned k = 0; k < chain.levels.size(); ++k) {
        BitStream m = r.bk_bitmask(k);
        ASSERT_EQ(bitmask_to_list(m), chain.levels[k]);
      }
      // Position 0 context is always a member of C_k.
      for (unsigned k = 0; k <= r.K(); ++k) {
        uint64_t a = schedule::alpha(k);
        if (r.q() <= k) break;
        ASSERT_TRUE(r.contexts()->contains(k, t.extract(-static_cast<int64_t>(a), static_cast<unsigned>(2 * a))));
      }
    }
  }
  EXPECT_GT(packed_runs, 50);
}

TEST(Recompressor, ContextSetZeroIsAllPairs) {
  std::vector<uint32_t> raw = {0, 1, 1, 0, 0};
  PackedText t = make(raw, 2);
  ContextSets cs(t, 1, uint64_t{1} << 16);
  unsigned bps = t.bits_per_symbol();
  auto code = [&](uint32_t a, uint32_t b) { return uint64_t{a} | (uint64_t{b} << bps); };
  for (uint32_t a = 0; a < 4; ++a)
    for (uint32_t b = 0; b < 4; ++b) {
      bool occurs = false;
      for (int64_t i = -1; i < 5; ++i) occurs |= t.at(i) == a && t.at(i + 1) == b;
      bool expect = occurs && !(a == 3 && b == 3);
      EXPECT_EQ(cs.contains(0, code(a, b)), expect) << a << b;
    }
}

TEST(Recompressor, LinearFallbackWhenDisabled) {
  std::mt19937_64 rng(17);
  auto raw = corpus::random_text(rng, 300, 4);
  PackedText t = make(raw, 4);
  Recompressor r(t);
  EXPECT_FALSE(r.packed());
  EXPECT_EQ(r.chain().levels, build_chain_linear(t).levels);
  EXPECT_TRUE(r.bk_explicit(r.q()).empty());
  EXPECT_TRUE(r.bk_explicit(r.q() + 40).empty());
}
