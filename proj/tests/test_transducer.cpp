#include <gtest/gtest.h>

#include <random>

#include "ssync/errors.hpp"
#include "ssync/oracle.hpp"
#include "ssync/transducer.hpp"
#include "transducers.hpp"

using namespace ssync;

namespace {

TransducerSpec decrement() {
  TransducerSpec s;
  s.delta = [](State, std::span<const uint64_t> c) { return Step{0, c[0] == 0 ? 0 : c[0] - 1}; };
  return s;
}

TransducerSpec identity() {
  TransducerSpec s;
  s.delta = [](State, std::span<const uint64_t> c) { return Step{0, c[0]}; };
  return s;
}

std::vector<uint64_t> reference(const TransducerSpec& spec, const std::vector<std::vector<uint64_t>>& in) {
  return oracle::run_reference_transducer(spec.s0, spec.delta, in);
}

// Walks the graph edge by edge.
std::optional<uint32_t> walk(const std::vector<int64_t>& next, uint32_t v, uint64_t d) {
  for (uint64_t i = 0; i < d; ++i) {
    if (next[v] < 0) return std::nullopt;
    v = static_cast<uint32_t>(next[v]);
  }
  return v;
}

}  // namespace

TEST(RunNaive, Examples) {
  EXPECT_EQ(run_naive(decrement(), {{2, 0, 1}}).output, (std::vector<uint64_t>{1, 0, 0}));
  std::vector<uint64_t> a{5, 0, 0, 7, 1};
  EXPECT_EQ(run_naive(identity(), {a}).output, a);
  TransducerSpec two = decrement();
  two.q = 3;
  two.s0 = 2;
  NaiveRun empty = run_naive(two, {{}});
  EXPECT_TRUE(empty.output.empty());
  EXPECT_EQ(empty.final_state, 2u);
  EXPECT_THROW(run_naive(decrement(), {{1}, {2}}), std::invalid_argument);
  TransducerSpec pair = decrement();
  pair.t = 2;
  EXPECT_THROW(run_naive(pair, {{1, 2}, {3}}), std::invalid_argument);
}

TEST(JumpStructure, Path) {
  JumpStructure j({1, 2, -1});
  EXPECT_EQ(j.jump(0, 2), 2u);
  EXPECT_EQ(j.jump(0, 0), 0u);
  EXPECT_FALSE(j.jump(0, 3).has_value());
  EXPECT_EQ(j.furthest(0), 2u);
  EXPECT_EQ(j.furthest(2), 0u);
}

TEST(JumpStructure, Cycle) {
  JumpStructure j({1, 2, 0});
  for (uint32_t v = 0; v < 3; ++v) EXPECT_EQ(j.furthest(v), kInfiniteJump);
  EXPECT_EQ(j.jump(0, 1000000000), static_cast<uint32_t>(1000000000 % 3));
  EXPECT_EQ(j.jump(1, UINT64_MAX), static_cast<uint32_t>((1 + UINT64_MAX % 3) % 3));
}

TEST(JumpStructure, RandomPseudoforestsMatchWalking) {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 300; ++it) {
    uint32_t n = 1 + static_cast<uint32_t>(rng() % 40);
    std::vector<int64_t> next(n);
    for (auto& v : next) v = rng() % 5 == 0 ? -1 : static_cast<int64_t>(rng() % n);
    JumpStructure j(next);
    for (uint32_t v = 0; v < n; ++v) {
      uint64_t far = 0;
      while (far <= 2 * n && walk(next, v, far + 1)) ++far;
      EXPECT_EQ(j.furthest(v), far > n ? kInfiniteJump : far);
      for (uint64_t d = 0; d <= 2 * n + 2; ++d) ASSERT_EQ(j.jump(v, d), walk(next, v, d));
    }
  }
}

TEST(Accelerated, DecrementAcrossLongZeroRuns) {
  std::vector<uint64_t> a(1000000, 0), want(1000000, 0);
  a.push_back(5);
  want.push_back(4);
  a.resize(2000001, 0);
  want.resize(2000001, 0);
  auto h = accelerate_single(decrement());
  RunStats st;
  SparseEncoding out = run_sparse(*h, senc_encode(a), &st);
  EXPECT_EQ(out, senc_encode(want));
  EXPECT_EQ(senc_decode(out), reference(decrement(), {a}));
  EXPECT_LT(st.macro_steps + st.micro_steps, 20u);
}

TEST(Accelerated, AllZeroGivesOneToken) {
  auto h = accelerate_single(identity());
  std::vector<uint64_t> a(12345, 0);
  SparseEncoding out = h->run(senc_encode(a));
  EXPECT_EQ(out.stream.size(), token_size(12345));
  EXPECT_EQ(out.decoded_len, 12345u);
  EXPECT_EQ(h->run(SparseEncoding{}).decoded_len, 0u);
}

TEST(Accelerated, WindowParameters) {
  EXPECT_EQ(accel_window_bits({}), 4u);
  EXPECT_EQ(accel_window_bits({uint64_t{1} << 24, 0}), 6u);
  EXPECT_EQ(accel_window_bits({4, 0}), 2u);
  EXPECT_EQ(accel_window_bits({16, 9}), 9u);
  EXPECT_THROW(accel_window_bits({1, 0}), std::invalid_argument);
  auto h = accelerate_single(identity(), {kDefaultTableN, 8});
  EXPECT_EQ(h->fixed_step(), 4u);
}

TEST(Accelerated, RandomSpecsMatchNaive) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    uint32_t q = 1 + static_cast<uint32_t>(rng() % 8);
    uint64_t sigma = 2 + rng() % 15;
    auto rt = corpus::random_transducer(rng, q, 1, sigma);
    unsigned bits = it % 3 == 0 ? 0 : static_cast<unsigned>(4 + rng() % 9);
    auto h = accelerate_single(rt.spec, {kDefaultTableN, bits});
    for (int k = 0; k < 6; ++k) {
      double dens = k % 3 == 0 ? 0.5 : k % 3 == 1 ? 0.05 : 0.005;
      uint64_t long_run = k == 5 && it % 10 == 0 ? 1000000 : rng() % 2 ? rng() % 5000 : 0;
      auto a = corpus::sparse_input(rng, rng() % 3000, sigma, dens, long_run);
      RunStats st;
      SparseEncoding got = h->run(senc_encode(a), &st);
      ASSERT_EQ(got, senc_encode(reference(rt.spec, {a}))) << "spec " << it << " input " << k;
      ASSERT_EQ(st.short_pairs, 0u);
    }
  }
}

TEST(Accelerated, MacroStepsScaleWithEncoding) {
  std::mt19937_64 rng(5);
  auto h = accelerate_single(identity(), {kDefaultTableN, 12});
  auto a = corpus::sparse_input(rng, 200000, 4, 0.01);
  SparseEncoding in = senc_encode(a);
  RunStats st;
  h->run(in, &st);
  EXPECT_LE(st.macro_steps, 2 * in.stream.size() / 12 + 2);
}

TEST(Accelerated, RejectsMalformedInput) {
  auto h = accelerate_single(identity());
  SparseEncoding e = senc_encode(std::vector<uint64_t>{1, 0, 0, 3});
  SparseEncoding shorter = e;
  shorter.decoded_len = 3;
  EXPECT_THROW(h->run(shorter), DecodeError);
  SparseEncoding longer = e;
  longer.decoded_len = 9;
  EXPECT_THROW(h->run(longer), DecodeError);
  SparseEncoding cut = e;
  cut.stream.resize(e.stream.size() - 1);
  EXPECT_THROW(h->run(cut), DecodeError);
  SparseEncoding twice{BitStream::from_string("0010" "011"), 3};
  EXPECT_THROW(h->run(twice), DecodeError);
  TransducerSpec small = identity();
  small.sigma = 3;
  auto hs = accelerate_single(small);
  EXPECT_THROW(hs->run(senc_encode(std::vector<uint64_t>{1, 2, 3})), InvalidInput);
}

TEST(Zip, Symbols) {
  EXPECT_EQ(zip_symbol(std::vector<uint64_t>{0, 0}), 0u);
  // 1 . senc([3]) = 1 . 1 011
  EXPECT_EQ(zip_symbol(std::vector<uint64_t>{3}), 0b11011u);
  // 1 . senc([0, 2]) = 1 . 0 1 . 1 010
  EXPECT_EQ(zip_symbol(std::vector<uint64_t>{0, 2}), 0b1011010u);
  EXPECT_EQ(unzip_symbol(0b1011010u, 2), (std::vector<uint64_t>{0, 2}));
  EXPECT_EQ(unzip_symbol(0, 3), (std::vector<uint64_t>{0, 0, 0}));
  EXPECT_THROW(unzip_symbol(0b1011010u, 3), DecodeError);
  EXPECT_THROW(unzip_symbol(0b10, 1), DecodeError);
  std::mt19937_64 rng(8);
  for (int it = 0; it < 2000; ++it) {
    std::vector<uint64_t> col(1 + rng() % 6);
    for (auto& v : col) v = rng() % 3 == 0 ? 0 : rng() % (col.size() <= 3 ? 200 : 8);
    uint64_t z = zip_symbol(col);
    bool zero = std::all_of(col.begin(), col.end(), [](uint64_t v) { return v == 0; });
    ASSERT_EQ(z == 0, zero);
    ASSERT_EQ(unzip_symbol(z, static_cast<unsigned>(col.size())), col);
  }
}

TEST(Zip, PairExamples) {
  ZipEngine zip;
  SparseEncoding zeros = senc_encode(std::vector<uint64_t>(40, 0));
  SparseEncoding z = zip.zip_pair(zeros, zeros);
  EXPECT_EQ(z, zeros);
  std::vector<uint64_t> a1{0, 3, 0}, a2{0, 0, 2};
  z = zip.zip_pair(senc_encode(a1), senc_encode(a2));
  auto dz = senc_decode(z);
  EXPECT_EQ(dz, (std::vector<uint64_t>{0, zip_symbol(std::vector<uint64_t>{3, 0}), zip_symbol(std::vector<uint64_t>{0, 2})}));
  auto back = zip.unzip(z, 2);
  EXPECT_EQ(senc_decode(back[0]), a1);
  EXPECT_EQ(senc_decode(back[1]), a2);
  EXPECT_THROW(zip.zip_pair(senc_encode(a1), senc_encode(std::vector<uint64_t>{1})), std::invalid_argument);
}

TEST(Zip, RandomPairsMatchNaive) {
  std::mt19937_64 rng(21);
  for (unsigned bits : {0u, 2u, 5u, 6u}) {
    ZipEngine zip({kDefaultTableN, bits});
    for (int it = 0; it < 300; ++it) {
      uint64_t n = rng() % 2000;
      uint64_t sigma = 2 + rng() % 300;
      auto a = corpus::sparse_input(rng, n, sigma, it % 2 ? 0.3 : 0.01);
      auto b = corpus::sparse_input(rng, n, sigma, it % 3 ? 0.02 : 0.5);
      if (it % 17 == 0) {
        a.resize(n + 300000, 0);
        b.resize(n + 150000, 0);
        b.push_back(7);
        b.resize(n + 300000, 0);
      }
      SparseEncoding got = zip.zip_pair(senc_encode(a), senc_encode(b));
      ASSERT_EQ(got, senc_encode(zip_naive({a, b}))) << "bits " << bits << " case " << it;
    }
  }
}

TEST(Zip, MultiAndUnzip) {
  std::mt19937_64 rng(22);
  ZipEngine zip;
  for (int it = 0; it < 200; ++it) {
    unsigned t = 1 + static_cast<unsigned>(rng() % 6);
    uint64_t n = rng() % 1500;
    std::vector<std::vector<uint64_t>> in;
    std::vector<SparseEncoding> enc;
    for (unsigned j = 0; j < t; ++j) {
      in.push_back(corpus::sparse_input(rng, n, 2 + rng() % 40, rng() % 2 ? 0.05 : 0.4));
      enc.push_back(senc_encode(in.back()));
    }
    SparseEncoding z = zip.zip_multi(enc);
    ASSERT_EQ(z, senc_encode(zip_naive(in)));
    auto back = zip.unzip(z, t);
    for (unsigned j = 0; j < t; ++j) ASSERT_EQ(back[j], enc[j]);
  }
  std::vector<SparseEncoding> none;
  EXPECT_THROW(zip.zip_multi(none), std::invalid_argument);
}

TEST(Zip, SingleStreamRelabel) {
  ZipEngine zip;
  std::vector<uint64_t> a{0, 4, 0, 0, 1};
  std::vector<SparseEncoding> one{senc_encode(a)};
  auto z = senc_decode(zip.zip_multi(one));
  EXPECT_EQ(z, (std::vector<uint64_t>{0, zip_symbol(std::vector<uint64_t>{4}), 0, 0, zip_symbol(std::vector<uint64_t>{1})}));
}

TEST(Zip, SizeLawReported) {
  std::mt19937_64 rng(23);
  ZipEngine zip;
  double worst = 0;
  for (int it = 0; it < 200; ++it) {
    unsigned t = 2 + static_cast<unsigned>(rng() % 3);
    uint64_t n = 1 + rng() % 4000;
    std::vector<SparseEncoding> enc;
    uint64_t total = 0;
    for (unsigned j = 0; j < t; ++j) {
      enc.push_back(senc_encode(corpus::sparse_input(rng, n, 16, rng() % 2 ? 0.01 : 0.3)));
      total += enc.back().stream.size();
    }
    double ratio = static_cast<double>(zip.zip_multi(enc).stream.size()) / static_cast<double>(total + 1);
    worst = std::max(worst, ratio);
  }
  RecordProperty("zip_size_ratio", std::to_string(worst));
  std::cout << "largest |senc(zip)| / sum |senc(A_j)| = " << worst << "\n";
}

TEST(RunMulti, MajorityOfThreeMasks) {
  TransducerSpec maj;
  maj.t = 3;
  maj.sigma = 2;
  maj.delta = [](State, std::span<const uint64_t> c) { return Step{0, c[0] + c[1] + c[2] >= 2 ? 1u : 0u}; };
  std::mt19937_64 rng(31);
  for (int it = 0; it < 50; ++it) {
    uint64_t n = rng() % 5000;
    std::vector<std::vector<uint64_t>> in;
    std::vector<SparseEncoding> enc;
    for (int j = 0; j < 3; ++j) {
      in.push_back(corpus::sparse_input(rng, n, 2, it % 2 ? 0.5 : 0.02));
      enc.push_back(senc_encode(in.back()));
    }
    ASSERT_EQ(run_multi(maj, enc), senc_encode(reference(maj, in)));
  }
}

TEST(RunMulti, RandomSpecsMatchNaive) {
  std::mt19937_64 rng(32);
  AccelCache cache;
  for (int it = 0; it < 60; ++it) {
    unsigned t = 1 + static_cast<unsigned>(rng() % 3);
    auto rt = corpus::random_transducer(rng, 1 + static_cast<uint32_t>(rng() % 8), t, 2 + rng() % 6);
    std::string key = "spec" + std::to_string(it);
    for (int k = 0; k < 4; ++k) {
      uint64_t n = rng() % 2000;
      std::vector<std::vector<uint64_t>> in;
      std::vector<SparseEncoding> enc;
      for (unsigned j = 0; j < t; ++j) {
        in.push_back(corpus::sparse_input(rng, n, rt.spec.sigma, k % 2 ? 0.3 : 0.01));
        if (k == 3) in.back().resize(n + 200000, 0);
        enc.push_back(senc_encode(in.back()));
      }
      ASSERT_EQ(cache.run_multi(key, rt.spec, enc), senc_encode(reference(rt.spec, in)));
    }
  }
  EXPECT_EQ(cache.size(), 60u);
  TransducerSpec spec = decrement();
  auto h1 = cache.get("dec", spec);
  auto h2 = cache.get("dec", spec);
  EXPECT_EQ(h1.get(), h2.get());
}
