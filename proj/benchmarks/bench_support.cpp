#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "ssync/ranksupport.hpp"
#include "ssync/sparsecodec.hpp"

using namespace ssync;

namespace {

SparseEncoding mask(uint64_t n, uint64_t gap) {
  std::mt19937_64 rng(4);
  std::vector<uint64_t> a(n, 0);
  for (uint64_t i = rng() % gap; i < n; i += 1 + rng() % (2 * gap)) a[i] = 1;
  return senc_encode(a);
}

void BM_SparseRank(benchmark::State& state) {
  SparseMaskSupport s(mask(1 << 20, static_cast<uint64_t>(state.range(0))));
  std::mt19937_64 rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(s.rank(rng() % (1 << 20)));
}
BENCHMARK(BM_SparseRank)->Arg(8)->Arg(512);

void BM_SparseSelect(benchmark::State& state) {
  SparseMaskSupport s(mask(1 << 20, static_cast<uint64_t>(state.range(0))));
  std::mt19937_64 rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(s.select(1 + rng() % s.ones()));
}
BENCHMARK(BM_SparseSelect)->Arg(8)->Arg(512);

void BM_VebPred(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::vector<uint64_t> keys(static_cast<size_t>(state.range(0)));
  for (auto& k : keys) k = rng() % (uint64_t{1} << 48);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  VebIndex v(keys, 48, keys.size(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(v.pred(rng() % (uint64_t{1} << 48)));
}
BENCHMARK(BM_VebPred)->Arg(1 << 10)->Arg(1 << 16);

void BM_BinarySearchPred(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::vector<uint64_t> keys(static_cast<size_t>(state.range(0)));
  for (auto& k : keys) k = rng() % (uint64_t{1} << 48);
  std::sort(keys.begin(), keys.end());
  for (auto _ : state) benchmark::DoNotOptimize(std::upper_bound(keys.begin(), keys.end(), rng() % (uint64_t{1} << 48)));
}
BENCHMARK(BM_BinarySearchPred)->Arg(1 << 10)->Arg(1 << 16);

}  // namespace
