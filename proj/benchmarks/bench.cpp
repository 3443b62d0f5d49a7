#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "tbmcg/algorithm.hpp"
#include "tbmcg/noise.hpp"

using namespace tbmcg;

namespace {

void step_loop(benchmark::State& state, AlgorithmKind kind) {
  const auto L = static_cast<std::size_t>(state.range(0));
  AlgorithmSpec spec;
  spec.kind = kind;
  auto f = make_filter(spec, L);
  Rng rng(1);
  // Pre-drawn data keeps RNG cost out of the timing.
  std::vector<double> u(4096), v(4096);
  for (auto& s : u) s = rng.normal();
  for (auto& s : v) s = sample_alpha_stable(1.8, 0.1, rng);
  std::vector<double> x(L, 0.0);
  std::size_t n = 0;
  for (auto _ : state) {
    std::rotate(x.rbegin(), x.rbegin() + 1, x.rend());
    x[0] = u[n & 4095];
    benchmark::DoNotOptimize(f->step(x, x[0] + v[n & 4095]));
    ++n;
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_CgStep(benchmark::State& s) { step_loop(s, AlgorithmKind::cg); }
void BM_TbmcgStep(benchmark::State& s) { step_loop(s, AlgorithmKind::tbmcg); }
void BM_RlsStep(benchmark::State& s) { step_loop(s, AlgorithmKind::rls); }
void BM_NlmsStep(benchmark::State& s) { step_loop(s, AlgorithmKind::nlms); }

void BM_AlphaStable(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 10.0;
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_alpha_stable(alpha, 1.0, rng));
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_CgStep)->RangeMultiplier(2)->Range(8, 128);
BENCHMARK(BM_TbmcgStep)->RangeMultiplier(2)->Range(8, 128);
BENCHMARK(BM_RlsStep)->RangeMultiplier(2)->Range(8, 128);
BENCHMARK(BM_NlmsStep)->RangeMultiplier(2)->Range(8, 128);
BENCHMARK(BM_AlphaStable)->Arg(12)->Arg(15)->Arg(18)->Arg(20);

BENCHMARK_MAIN();
