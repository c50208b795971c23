#include <benchmark/benchmark.h>

#include <random>

#include "externet/externet.hpp"

using namespace externet;

namespace {

// Zero-diagonal matrix with a Hamiltonian cycle plus random extra links.
Matrix network(int n, double density, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  Matrix M = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && coin(gen) < density) M(i, j) = weight(gen);
    }
    M((i + 1) % n, i) = weight(gen);
  }
  return M;
}

EconomySpec family(int n, std::uint64_t seed) {
  const Matrix G = network(n, 0.3, seed);
  const Matrix H = network(n, 0.3, seed + 1);
  return EconomySpec::linear_log(0.5 / spectral_radius(G), G, H);
}

void BM_PerronPair(benchmark::State& state) {
  const Matrix M = network(static_cast<int>(state.range(0)), 0.3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(perron_pair(M));
}
BENCHMARK(BM_PerronPair)->RangeMultiplier(2)->Range(4, 128);

void BM_SolveCentrality(benchmark::State& state) {
  const auto spec = family(static_cast<int>(state.range(0)), 2);
  SolveOptions opts;
  opts.init = ActionProfile::ones(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_centrality(spec, opts));
}
BENCHMARK(BM_SolveCentrality)->RangeMultiplier(2)->Range(4, 64);

void BM_EssentialSweep(benchmark::State& state) {
  const Matrix B0 = network(static_cast<int>(state.range(0)), 0.2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(essential_agents(B0));
}
BENCHMARK(BM_EssentialSweep)->RangeMultiplier(2)->Range(4, 64);

void BM_CycleValues(benchmark::State& state) {
  const Matrix M = network(static_cast<int>(state.range(0)), 0.3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(cycle_value_estimate(M, 60));
}
BENCHMARK(BM_CycleValues)->RangeMultiplier(2)->Range(4, 64);

void BM_CoreCheck(benchmark::State& state) {
  const auto spec = family(static_cast<int>(state.range(0)), 5);
  const auto cert = solve_centrality(spec);
  CoreCheckOptions opts;
  opts.radius = 3.0 * cert.a_star.values().maxCoeff();
  for (auto _ : state) benchmark::DoNotOptimize(core_check_bruteforce(spec, cert.a_star, opts));
}
BENCHMARK(BM_CoreCheck)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
