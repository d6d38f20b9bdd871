// Serial reference vs OpenMP for the ensemble kernels. Both paths draw the same
// per-index streams, so they compute identical results; only the wall time differs.
//
//   ./bench_kernels --benchmark_counters_tabular=true
//   OMP_NUM_THREADS=8 ./bench_kernels

#include <benchmark/benchmark.h>

#include <omp.h>

#include "gnls/kernels.hpp"

namespace {

using namespace gnls;

ModelParams bench_model() {
  ModelParams mp;
  mp.lambda = 0.1;
  mp.kappa = 1;
  mp.r = 10;
  mp.L = 2 * std::numbers::pi;
  return mp;
}

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st) {
  st.SetLabel(st.range(0) ? "openmp x" + std::to_string(omp_get_max_threads()) : "serial");
}

void BM_simulate_ensemble(benchmark::State& st) {
  const auto mp = bench_model();
  SimConfig sc;
  sc.dt = 0.02;
  sc.t_final = 1;
  sc.seed = 1;
  sc.observables = {Observable::parse("l2sq"), Observable::parse("hamiltonian")};
  const std::vector<SpectralField> init{SpectralField(8, mp.L)};
  const auto n = static_cast<std::size_t>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_ensemble(init, mp, sc, n, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * st.range(1) * sc.steps());
  label(st);
}

void BM_sample_chains(benchmark::State& st) {
  const auto mp = bench_model();
  ChainConfig cc;
  cc.burn_in = 100;
  cc.thin = 5;
  cc.seed = 2;
  const int chains = static_cast<int>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(sample_chains(mp, 8, cc, 100, chains, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * chains * 100);
  label(st);
}

void BM_sample_free_batch(benchmark::State& st) {
  const auto mp = bench_model();
  const auto n = static_cast<std::size_t>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(sample_free_batch(mp, 16, 3, n, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * st.range(1));
  label(st);
}

void BM_pencil_minima(benchmark::State& st) {
  const auto mp = bench_model();
  std::vector<std::vector<std::complex<double>>> samples;
  for (const auto& f : sample_free_batch(mp, 4, 4, static_cast<std::size_t>(st.range(1)), Exec::serial))
    samples.emplace_back(f.coeffs().begin(), f.coeffs().end());
  const auto wp = witten_params_from_model(mp);
  for (auto _ : st) benchmark::DoNotOptimize(pencil_minima(samples, wp, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * st.range(1));
  label(st);
}

}  // namespace

BENCHMARK(BM_simulate_ensemble)->ArgsProduct({{0, 1}, {256, 2048}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_sample_chains)->ArgsProduct({{0, 1}, {16}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_sample_free_batch)->ArgsProduct({{0, 1}, {10000}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_pencil_minima)->ArgsProduct({{0, 1}, {1000}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
