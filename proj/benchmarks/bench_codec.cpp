#include <benchmark/benchmark.h>

#include <random>

#include "ssync/sparsecodec.hpp"
#include "ssync/transducer.hpp"
#include "transducers.hpp"

using namespace ssync;

namespace {

std::vector<uint64_t> sparse_array(uint64_t n, double density) {
  std::mt19937_64 rng(1);
  return corpus::sparse_input(rng, n, 16, density);
}

void BM_Encode(benchmark::State& state) {
  auto a = sparse_array(static_cast<uint64_t>(state.range(0)), 1.0 / static_cast<double>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(senc_encode(a));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Encode)->Args({1 << 20, 2})->Args({1 << 20, 64});

void BM_Decode(benchmark::State& state) {
  auto e = senc_encode(sparse_array(static_cast<uint64_t>(state.range(0)), 1.0 / static_cast<double>(state.range(1))));
  for (auto _ : state) benchmark::DoNotOptimize(senc_decode(e));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Decode)->Args({1 << 20, 2})->Args({1 << 20, 64});

TransducerSpec decrement_spec() {
  TransducerSpec s;
  s.sigma = 16;
  s.delta = [](State, std::span<const uint64_t> c) { return Step{0, c[0] > 0 ? c[0] - 1 : 0}; };
  return s;
}

void BM_TransducerNaive(benchmark::State& state) {
  auto a = sparse_array(static_cast<uint64_t>(state.range(0)), 1.0 / static_cast<double>(state.range(1)));
  auto spec = decrement_spec();
  for (auto _ : state) benchmark::DoNotOptimize(run_naive(spec, {a}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransducerNaive)->Args({1 << 20, 64})->Args({1 << 20, 4096});

void BM_TransducerAccelerated(benchmark::State& state) {
  auto e = senc_encode(sparse_array(static_cast<uint64_t>(state.range(0)), 1.0 / static_cast<double>(state.range(1))));
  auto h = accelerate_single(decrement_spec());
  for (auto _ : state) benchmark::DoNotOptimize(h->run(e));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransducerAccelerated)->Args({1 << 20, 64})->Args({1 << 20, 4096});

}  // namespace
