// OpenMP kernels against the serial reference, plus whole-run enumeration.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qsts/kernels.hpp"
#include "qsts/protocol.hpp"

namespace {

using qsts::kernels::Amplitude;

std::vector<Amplitude> random_amplitudes(int n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<Amplitude> v(std::size_t{1} << n);
  for (auto& a : v) a = {g(rng), g(rng)};
  return v;
}

const std::array<Amplitude, 4> kFlip{0.0, 1.0, -1.0, 0.0};
const std::array<Amplitude, 4> kPhiPlus{0.7071067811865476, 0.0, 0.0,
                                        0.7071067811865476};

void BM_Apply1q_Omp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto v = random_amplitudes(n);
  for (auto _ : state) {
    qsts::kernels::apply_1q(v, n, n / 2, kFlip);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(v.size()));
}

void BM_Apply1q_Reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto v = random_amplitudes(n);
  for (auto _ : state) {
    qsts::kernels::reference::apply_1q(v, n, n / 2, kFlip);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(v.size()));
}

void BM_ContractPair_Omp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto v = random_amplitudes(n);
  std::vector<Amplitude> out(v.size() / 4);
  for (auto _ : state) {
    qsts::kernels::contract_pair(v, n, 1, n - 2, kPhiPlus, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(v.size()));
}

void BM_ContractPair_Reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto v = random_amplitudes(n);
  std::vector<Amplitude> out(v.size() / 4);
  for (auto _ : state) {
    qsts::kernels::reference::contract_pair(v, n, 1, n - 2, kPhiPlus, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(v.size()));
}

void BM_Tensor_Omp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = random_amplitudes(n / 2);
  const auto b = random_amplitudes(n - n / 2);
  std::vector<Amplitude> out(a.size() * b.size());
  for (auto _ : state) {
    qsts::kernels::tensor(a, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Tensor_Reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = random_amplitudes(n / 2);
  const auto b = random_amplitudes(n - n / 2);
  std::vector<Amplitude> out(a.size() * b.size());
  for (auto _ : state) {
    qsts::kernels::reference::tensor(a, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_EnumerateBranches(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  qsts::RandomStream rng(1);
  const auto secret = qsts::random_secret(m, rng);
  for (auto _ : state) {
    auto branches = qsts::enumerate_branches(qsts::make_config(m, n), secret);
    benchmark::DoNotOptimize(branches.data());
  }
}

}  // namespace

BENCHMARK(BM_Apply1q_Omp)->DenseRange(12, 22, 5);
BENCHMARK(BM_Apply1q_Reference)->DenseRange(12, 22, 5);
BENCHMARK(BM_ContractPair_Omp)->DenseRange(12, 22, 5);
BENCHMARK(BM_ContractPair_Reference)->DenseRange(12, 22, 5);
BENCHMARK(BM_Tensor_Omp)->DenseRange(12, 22, 5);
BENCHMARK(BM_Tensor_Reference)->DenseRange(12, 22, 5);
BENCHMARK(BM_EnumerateBranches)->Args({2, 2})->Args({3, 3})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
