#include <gtest/gtest.h>

#include <random>

#include "ssync/errors.hpp"
#include "ssync/oracle.hpp"
#include "ssync/ranksupport.hpp"

using namespace ssync;

namespace {

std::vector<bool> random_mask(std::mt19937_64& rng, uint64_t n, double density) {
  std::vector<bool> a(n);
  std::bernoulli_distribution d(density);
  for (uint64_t i = 0; i < n; ++i) a[i] = d(rng);
  // clustered stretches of ones
  if (n > 0 && rng() % 2)
    for (uint64_t i = rng() % n, k = 0; i < n && k < 200; ++i, ++k) a[i] = true;
  return a;
}

SparseEncoding enc(const std::vector<bool>& a) {
  std::vector<uint64_t> v(a.begin(), a.end());
  return senc_encode(v);
}

}  // namespace

TEST(BitRankSelect, MatchesNaive) {
  std::mt19937_64 rng(1);
  for (int it = 0; it < 40; ++it) {
    uint64_t n = rng() % 5000;
    auto a = random_mask(rng, n, it % 2 ? 0.5 : 0.01);
    BitStream b;
    for (bool x : a) b.append_bit(x);
    BitRankSelect rs(b);
    auto ref = oracle::brute_rank_select(a);
    for (uint64_t i = 0; i <= n; ++i) ASSERT_EQ(rs.rank(i), ref.rank(i));
    for (uint64_t j = 1; j <= rs.ones(); ++j) ASSERT_EQ(rs.select(j), ref.select(j));
    EXPECT_THROW(rs.select(rs.ones() + 1), std::invalid_argument);
  }
}

TEST(Decomposition, AllZero) {
  Decomposition d(senc_encode(std::vector<uint64_t>(100000, 0)));
  EXPECT_EQ(d.h(), 1u);
  EXPECT_TRUE(d.all_zero(0));
  EXPECT_EQ(d.pieces()[1].p, 100000u);
}

TEST(Decomposition, SingleFarBit) {
  std::vector<uint64_t> a(1000001, 0);
  a[1000000] = 1;
  Decomposition d(senc_encode(a));
  // 0^(10^6) needs a 40-bit token, longer than the 16-bit window.
  ASSERT_EQ(d.h(), 2u);
  EXPECT_EQ(d.pieces()[1].p, 1000000u);
  EXPECT_EQ(d.pieces()[1].e, token_size(1000000));
  EXPECT_TRUE(d.all_zero(0));
  EXPECT_FALSE(d.all_zero(1));
  EXPECT_EQ(d.select_in(1, 1), 1000000u);
}

TEST(Decomposition, PiecesReassemble) {
  std::mt19937_64 rng(2);
  for (uint64_t tn : {uint64_t{16}, uint64_t{1} << 16, uint64_t{1} << 24}) {
    for (int it = 0; it < 60; ++it) {
      uint64_t n = rng() % 4000;
      auto a = random_mask(rng, n, it % 3 ? 0.02 : 0.4);
      SparseEncoding e = enc(a);
      Decomposition d(e, tn);
      const auto& ps = d.pieces();
      ASSERT_EQ(ps.front().p, 0u);
      ASSERT_EQ(ps.back().p, n);
      ASSERT_EQ(ps.back().e, e.stream.size());
      BitStream joined;
      uint64_t ones = 0;
      for (uint64_t i = 0; i < d.h(); ++i) {
        std::vector<uint64_t> part(a.begin() + static_cast<int64_t>(ps[i].p), a.begin() + static_cast<int64_t>(ps[i + 1].p));
        SparseEncoding pe = senc_encode(part);
        BitStream slice;
        slice.append_range(e.stream, ps[i].e, ps[i + 1].e);
        ASSERT_EQ(slice, pe.stream);
        joined.append_stream(slice);
        ASSERT_EQ(ps[i].r, ones);
        for (uint64_t v : part) ones += v;
        bool zero = std::all_of(part.begin(), part.end(), [](uint64_t v) { return v == 0; });
        if (!zero) {
          ASSERT_LE(ps[i + 1].r - ps[i].r, ps[i + 1].e - ps[i].e);
          ASSERT_LE(ps[i + 1].e - ps[i].e, d.window());
        }
        if (i + 1 < d.h()) ASSERT_GE(ps[i + 2].e - ps[i].e, d.window());
      }
      ASSERT_EQ(joined, e.stream);
    }
  }
}

TEST(Decomposition, RejectsNonMasks) {
  EXPECT_THROW(Decomposition(senc_encode(std::vector<uint64_t>{0, 2, 1})), InvalidInput);
  SparseEncoding bad = senc_encode(std::vector<uint64_t>{1, 0, 1});
  bad.decoded_len = 4;
  EXPECT_THROW(Decomposition{bad}, DecodeError);
}

TEST(Select, Examples) {
  SelectSupport s(senc_encode(std::vector<uint64_t>{0, 1, 0, 1}));
  EXPECT_EQ(s.ones(), 2u);
  EXPECT_EQ(s.select(1), 1u);
  EXPECT_EQ(s.select(2), 3u);
  EXPECT_THROW(s.select(0), std::invalid_argument);
  EXPECT_THROW(s.select(3), std::invalid_argument);
}

TEST(Select, RandomMatchesNaive) {
  std::mt19937_64 rng(3);
  for (uint64_t tn : {uint64_t{5}, uint64_t{1} << 10, uint64_t{1} << 16, uint64_t{1} << 20}) {
    for (int it = 0; it < 50; ++it) {
      auto a = random_mask(rng, rng() % 6000, it % 2 ? 0.3 : 0.003);
      SelectSupport s(enc(a), tn);
      auto ref = oracle::brute_rank_select(a);
      ASSERT_EQ(s.ones(), ref.ones.size());
      for (uint64_t j = 1; j <= s.ones(); ++j) ASSERT_EQ(s.select(j), ref.select(j));
    }
  }
}

TEST(Veb, Examples) {
  VebIndex v({3, 7, 10}, 4, 3, 8);
  EXPECT_EQ(v.pred(8), 7u);
  EXPECT_EQ(v.rank(8), 2u);
  EXPECT_FALSE(v.pred(2).has_value());
  EXPECT_EQ(v.rank(3), 0u);
  EXPECT_EQ(v.rank(100), 3u);
  VebIndex e({}, 8, 1, 8);
  EXPECT_FALSE(e.pred(5).has_value());
  EXPECT_EQ(e.rank(5), 0u);
  EXPECT_THROW(VebIndex({5, 5}, 8, 2, 8), std::invalid_argument);
  EXPECT_THROW(VebIndex({9, 4}, 8, 2, 8), std::invalid_argument);
  EXPECT_THROW(VebIndex({300}, 8, 2, 8), std::invalid_argument);
}

TEST(Veb, RandomSetsMatchBinarySearch) {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 400; ++it) {
    unsigned bits = 2 + static_cast<unsigned>(rng() % 40);
    uint64_t u = uint64_t{1} << bits;
    uint64_t n = rng() % 3000;
    std::vector<uint64_t> keys;
    for (uint64_t i = 0; i < n; ++i) keys.push_back(rng() % u);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    uint64_t space = std::max<uint64_t>(1, keys.size() * (1 + rng() % 8));
    unsigned w = 2 + static_cast<unsigned>(rng() % 8);
    VebIndex v(keys, bits, space, w, uint64_t{1} << (rng() % 20));
    for (int q = 0; q < 300; ++q) {
      uint64_t x = q % 3 == 0 && !keys.empty() ? keys[rng() % keys.size()] + (rng() % 3) - 1 : rng() % u;
      ASSERT_EQ(v.rank(x), oracle::brute_rank(keys, x)) << it;
      int64_t p = oracle::brute_pred(keys, x);
      auto got = v.pred(x);
      ASSERT_EQ(got.has_value(), p >= 0);
      if (got) ASSERT_EQ(*got, static_cast<uint64_t>(p));
    }
  }
}

TEST(Veb, RecursesOnClusteredSets) {
  std::mt19937_64 rng(6);
  std::vector<uint64_t> keys;
  for (int c = 0; c < 40; ++c) {
    uint64_t base = rng() % (uint64_t{1} << 39);
    for (int i = 0; i < 3000; ++i) keys.push_back(base + rng() % 200000);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  VebIndex v(keys, 40, keys.size(), 2);
  EXPECT_GE(v.depth(), 3u);
  for (int q = 0; q < 200000; ++q) {
    uint64_t x = q % 2 ? keys[rng() % keys.size()] + rng() % 5 - 2 : rng() % (uint64_t{1} << 40);
    ASSERT_EQ(v.rank(x), static_cast<uint64_t>(std::lower_bound(keys.begin(), keys.end(), x) - keys.begin()));
  }
}

TEST(Rank, RandomMatchesPrefixSums) {
  std::mt19937_64 rng(5);
  for (uint64_t tn : {uint64_t{5}, uint64_t{1} << 16, uint64_t{1} << 24}) {
    for (int it = 0; it < 40; ++it) {
      uint64_t n = rng() % 8000;
      auto a = random_mask(rng, n, it % 2 ? 0.2 : 0.002);
      SparseMaskSupport s(enc(a), tn);
      auto ref = oracle::brute_rank_select(a);
      EXPECT_EQ(s.rank(0), 0u);
      EXPECT_EQ(s.rank(n), ref.ones.size());
      for (uint64_t j = 0; j <= n; ++j) ASSERT_EQ(s.rank(j), ref.rank(j));
      EXPECT_THROW(s.rank(n + 1), std::invalid_argument);
      for (uint64_t j = 0; j < n; ++j) {
        int64_t p = oracle::brute_pred(ref.ones, j);
        auto got = s.pred(j);
        ASSERT_EQ(got.has_value(), p >= 0);
        if (got) ASSERT_EQ(*got, static_cast<uint64_t>(p));
      }
    }
  }
}

TEST(Rank, SelectAfterRankFindsNextOne) {
  for (uint64_t n = 1; n <= 12; ++n) {
    for (uint64_t bits = 0; bits < (uint64_t{1} << n); ++bits) {
      std::vector<bool> a(n);
      for (uint64_t i = 0; i < n; ++i) a[i] = (bits >> i) & 1u;
      SparseMaskSupport s(enc(a), 64);
      for (uint64_t pos = 0; pos < n; ++pos) {
        uint64_t next = pos;
        while (next < n && !a[next]) ++next;
        uint64_t r = s.rank(pos);
        if (next == n)
          ASSERT_EQ(r, s.ones());
        else
          ASSERT_EQ(s.select(r + 1), next);
      }
    }
  }
}

TEST(Rank, LongZeroRunsAndExplicitSpace) {
  std::vector<uint64_t> a(3000000, 0);
  for (uint64_t i : {5ull, 1000000ull, 1000001ull, 2999999ull}) a[i] = 1;
  SparseEncoding e = senc_encode(a);
  RankSupport r(e, kDefaultTableN, 1000);
  EXPECT_EQ(r.rank(6), 1u);
  EXPECT_EQ(r.rank(1000001), 2u);
  EXPECT_EQ(r.rank(2999999), 3u);
  EXPECT_EQ(r.rank(3000000), 4u);
  SelectSupport s(e);
  EXPECT_EQ(s.select(4), 2999999u);
}
