#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "ssync/oracle.hpp"
#include "ssync/syncset.hpp"

using namespace ssync;

namespace {

std::vector<uint64_t> mask_positions(const BitStream& m) {
  std::vector<uint64_t> v;
  for (uint64_t i = 0; i < m.size(); ++i)
    if (m.get(i)) v.push_back(i);
  return v;
}

}  // namespace

TEST(SyncSet, KOfTau) {
  EXPECT_EQ(k_of_tau(1), 0u);
  EXPECT_EQ(k_of_tau(16), 2u);
  std::vector<uint32_t> raw(5000, 0);
  SyncBuilder b(PackedText::from_symbols(raw, 1));
  for (uint64_t tau = 1; tau <= 2500; ++tau) ASSERT_EQ(b.level_for(tau), k_of_tau(tau)) << tau;
}

TEST(SyncSet, RejectsBadTau) {
  std::vector<uint32_t> raw = {0, 1, 0, 1, 1};
  SyncBuilder b(PackedText::from_symbols(raw, 2));
  EXPECT_THROW(b.explicit_set(0), std::invalid_argument);
  EXPECT_THROW(b.explicit_set(3), std::invalid_argument);
  EXPECT_THROW(b.bitmask(3), std::invalid_argument);
}

TEST(SyncSet, BoundaryOnlyWhenNoRuns) {
  // All-distinct text: no periodic windows, so Sync = {f - tau : f in B_k(tau)}.
  std::vector<uint32_t> raw(200);
  for (uint32_t i = 0; i < 200; ++i) raw[i] = i;
  PackedText t = PackedText::from_symbols(raw, 200);
  SyncBuilder b(t);
  for (uint64_t tau = 1; tau <= 100; ++tau) {
    std::vector<uint64_t> expect;
    for (uint64_t f : b.recompressor().bk_explicit(k_of_tau(tau)))
      if (f >= tau && f - tau <= 200 - 2 * tau) expect.push_back(f - tau);
    auto got = b.explicit_set(tau);
    ASSERT_EQ(got, expect);
    // Density: every window of length tau inside [0..n-3tau+1] holds a member.
    for (uint64_t i = 0; i + 3 * tau <= 201; ++i) {
      auto it = std::lower_bound(got.begin(), got.end(), i);
      ASSERT_TRUE(it != got.end() && *it < i + tau);
    }
  }
}

TEST(SyncSet, HalfLengthTau) {
  std::mt19937_64 rng(1);
  auto raw = corpus::random_text(rng, 41, 4);
  SyncBuilder b(PackedText::from_symbols(raw, 4));
  for (uint64_t i : b.explicit_set(20)) EXPECT_LE(i, 1u);
  EXPECT_EQ(mask_positions(b.bitmask(20)), b.explicit_set(20));
}

TEST(SyncSet, CorpusAgainstOracle) {
  auto corpus = corpus::make_corpus(303, 120, 300);
  for (const auto& c : corpus) {
    PackedText t = PackedText::from_symbols(c.text, c.sigma);
    uint64_t n = c.text.size();
    oracle::TextOracle o(c.text);
    SyncOptions combine, scatter;
    combine.combine_masks = 1;
    scatter.combine_masks = 0;
    SyncBuilder b1(t, combine), b2(t, scatter);
    for (uint64_t tau = 1; 2 * tau <= n; ++tau) {
      auto s = b1.explicit_set(tau);
      auto rep = oracle::verify_sync(o, tau, s);
      ASSERT_TRUE(rep.pass) << c.kind << " n=" << n << " tau=" << tau << " " << rep.condition << "@" << rep.position;
      ASSERT_LT(s.size() * tau, 70 * n);
      for (uint64_t i : s) ASSERT_GT(3 * o.period(i, 2 * tau), tau);
      ASSERT_EQ(mask_positions(b1.bitmask(tau)), s) << "combined tau=" << tau;
      ASSERT_EQ(mask_positions(b2.bitmask(tau)), s);
    }
  }
}

TEST(SyncSet, PackedRecompressionGivesSameSets) {
  auto corpus = corpus::make_corpus(404, 60, 300);
  for (const auto& c : corpus) {
    if (c.sigma > 4 || c.text.size() < 2) continue;
    PackedText t = PackedText::from_symbols(c.text, c.sigma);
    SyncOptions packed;
    packed.recompress.fallback_threshold = 0.01;
    SyncBuilder a(t), b(t, packed);
    for (uint64_t tau = 1; 2 * tau <= t.n(); ++tau) {
      ASSERT_EQ(a.explicit_set(tau), b.explicit_set(tau));
      ASSERT_EQ(a.bitmask(tau), b.bitmask(tau));
    }
  }
}

TEST(SyncSet, AdversarialFamilyFirstPositions) {
  std::mt19937_64 rng(9);
  for (uint64_t tau : {3u, 5u, 9u, 16u}) {
    for (int it = 0; it < 5; ++it) {
      auto c = corpus::adversarial_text(rng, 3 * tau * (3 + rng() % 6) + rng() % tau, tau);
      PackedText t = PackedText::from_symbols(c.text, 2);
      auto s = build_sync_explicit(t, tau);
      ASSERT_TRUE(oracle::verify_sync(c.text, tau, s).pass);
      for (uint64_t i = 0; i < c.planted.size(); ++i) {
        auto it2 = std::lower_bound(s.begin(), s.end(), 3 * tau * i);
        ASSERT_TRUE(it2 != s.end());
        ASSERT_EQ(*it2, 3 * tau * i + c.planted[i]) << tau << " block " << i;
      }
    }
  }
}

TEST(SyncSet, MutationsAreDetected) {
  std::mt19937_64 rng(11);
  int density = 0;
  for (int it = 0; it < 30; ++it) {
    auto raw = corpus::random_text(rng, 200, 2);
    auto s = build_sync_explicit(PackedText::from_symbols(raw, 2), 4);
    ASSERT_FALSE(s.empty());
    // Remove a member that is alone in some tau-window.
    for (size_t j = 0; j < s.size(); ++j) {
      uint64_t prev = j ? s[j - 1] : 0, next = j + 1 < s.size() ? s[j + 1] : 200;
      if (next - prev > 4 + (j ? 1 : 0) && s[j] + 12 <= 200) {
        auto m = s;
        m.erase(m.begin() + static_cast<long>(j));
        auto rep = oracle::verify_sync(raw, 4, m);
        if (!rep.pass && rep.condition == "density") ++density;
        break;
      }
    }
  }
  EXPECT_GT(density, 0);
}
