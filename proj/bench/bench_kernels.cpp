// Serial reference loops against their OpenMP counterparts, plus one full
// Hilbert transform for scale. Set OMP_NUM_THREADS to compare thread counts.
#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "cascade/hilbert.hpp"
#include "cascade/kernels.hpp"

namespace k = cascade::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

template <auto Fn>
void bench_multiply(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = random_vector(n, 1), b = random_vector(n, 2);
  std::vector<double> out(n);
  for (auto _ : st) {
    Fn(a, b, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(n));
}

template <auto Fn>
void bench_axpy(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = random_vector(n, 1);
  auto y = random_vector(n, 2);
  for (auto _ : st) {
    Fn(1e-9, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(n));
}

template <auto Fn>
void bench_rk4(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto y = random_vector(n, 1), k1 = random_vector(n, 2), k2 = random_vector(n, 3), k3 = random_vector(n, 4),
             k4 = random_vector(n, 5);
  std::vector<double> out(n);
  for (auto _ : st) {
    Fn(y, k1, k2, k3, k4, 1e-4, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(n));
}

template <auto Fn>
void bench_hilbert_multiplier(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto re = random_vector(n / 2 + 1, 1), im = random_vector(n / 2 + 1, 2);
  std::vector<std::complex<double>> spec(n / 2 + 1);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] = {re[i], im[i]};
  for (auto _ : st) {
    Fn(spec, 1.0);  // four applications restore the input up to cleared modes
    benchmark::DoNotOptimize(spec.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(spec.size()));
}

template <auto Fn>
void bench_log_lp(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto f = random_vector(n, 1);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(f, 8.0, 1.0 / 1024));
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(n));
}

template <auto Fn>
void bench_horner(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto alpha = random_vector(21, 1), beta = random_vector(21, 2), basis = random_vector(n, 3);
  std::vector<double> chi(n);
  for (std::size_t i = 0; i < n; ++i) chi[i] = (i % 3 == 0) ? 1.0 : 0.0;
  std::vector<double> out(n);
  for (auto _ : st) {
    Fn(alpha, beta, basis, chi, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(n));
}

void bench_hilbert_transform(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  cascade::HilbertTransformer h(n);
  auto f = random_vector(n, 1);
  for (auto _ : st) {
    h.apply(f, f);
    benchmark::DoNotOptimize(f.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(n));
}

}  // namespace

#define CASCADE_PAIR(name, fn)                                                      \
  BENCHMARK(name<k::serial::fn>)->Name(#fn "/serial")->RangeMultiplier(4)->Range(1 << 14, 1 << 18); \
  BENCHMARK(name<k::parallel::fn>)->Name(#fn "/parallel")->RangeMultiplier(4)->Range(1 << 14, 1 << 18)

CASCADE_PAIR(bench_multiply, multiply);
CASCADE_PAIR(bench_axpy, axpy);
CASCADE_PAIR(bench_rk4, rk4_combine);
CASCADE_PAIR(bench_hilbert_multiplier, hilbert_multiplier);
CASCADE_PAIR(bench_log_lp, log_lp_sum);
CASCADE_PAIR(bench_horner, horner_series);
BENCHMARK(bench_hilbert_transform)->Name("hilbert_transform")->RangeMultiplier(4)->Range(1 << 14, 1 << 18);

BENCHMARK_MAIN();
