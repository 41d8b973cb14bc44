#include <benchmark/benchmark.h>

#include <random>

#include "corpus.hpp"
#include "ssync/fastpath.hpp"
#include "ssync/syncset.hpp"

using namespace ssync;

namespace {

const PackedText& text() {
  static PackedText t = [] {
    std::mt19937_64 rng(3);
    return PackedText::from_symbols(corpus::random_text(rng, 1 << 18, 4), 4);
  }();
  return t;
}

void BM_BuildExplicit(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(SyncBuilder(text()));
}
BENCHMARK(BM_BuildExplicit)->Unit(benchmark::kMillisecond);

void BM_BuildFast(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(FastSync(text()).n());
}
BENCHMARK(BM_BuildFast)->Unit(benchmark::kMillisecond);

void BM_QueryExplicit(benchmark::State& state) {
  static SyncBuilder b(text());
  for (auto _ : state) benchmark::DoNotOptimize(b.explicit_set(static_cast<uint64_t>(state.range(0))));
}
BENCHMARK(BM_QueryExplicit)->Arg(8)->Arg(64)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_QueryBitmask(benchmark::State& state) {
  static SyncBuilder b(text());
  for (auto _ : state) benchmark::DoNotOptimize(b.bitmask(static_cast<uint64_t>(state.range(0))));
}
BENCHMARK(BM_QueryBitmask)->Arg(8)->Arg(64)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_QuerySparse(benchmark::State& state) {
  static FastSync f(text());
  uint64_t tau = static_cast<uint64_t>(state.range(0));
  uint64_t bits = 0;
  for (auto _ : state) {
    SparseEncoding m = f.sync_sparse(tau);
    bits = m.stream.size();
    benchmark::DoNotOptimize(m);
  }
  state.counters["bits"] = static_cast<double>(bits);
}
BENCHMARK(BM_QuerySparse)->Arg(8)->Arg(64)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace
