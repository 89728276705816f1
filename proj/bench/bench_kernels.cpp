// OpenMP kernels against their serial reference twins.

#include <benchmark/benchmark.h>

#include <vector>

#include "fuzzyflow/kernels.hpp"
#include "fuzzyflow/torus.hpp"
#include "fuzzyflow/verify.hpp"

using namespace fuzzyflow;

namespace {

std::vector<cplx> entries(const CMatrix& a) { return {a.entries().begin(), a.entries().end()}; }

template <bool Parallel>
void gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  verify::Rng rng(1);
  const auto a = entries(verify::random_matrix(n, rng));
  const auto b = entries(verify::random_matrix(n, rng));
  std::vector<cplx> out(n * n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::gemm(n, a, b, out);
    else
      kernels::reference::gemm(n, a, b, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n * n));
}

template <bool Parallel>
void laplacian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FuzzyTorus T({n, 1});
  verify::Rng rng(2);
  const auto x = entries(T.x()), y = entries(T.y());
  const auto a = entries(verify::random_matrix(static_cast<std::size_t>(n), rng));
  std::vector<cplx> out(a.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::laplacian(static_cast<std::size_t>(n), x, y, a, out);
    else
      kernels::reference::laplacian(static_cast<std::size_t>(n), x, y, a, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void superop(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FuzzyTorus T({n, 1});
  const auto x = entries(T.x()), y = entries(T.y());
  std::vector<cplx> out(static_cast<std::size_t>(n) * n * n * n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::laplacian_superop(static_cast<std::size_t>(n), x, y, out);
    else
      kernels::reference::laplacian_superop(static_cast<std::size_t>(n), x, y, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void apply(benchmark::State& state) {
  const auto big = static_cast<std::size_t>(state.range(0));
  verify::Rng rng(3);
  std::vector<cplx> op(big * big), v(big), out(big);
  for (auto& z : op) z = cplx{std::uniform_real_distribution<double>(-1, 1)(rng), 0.0};
  for (auto& z : v) z = cplx{1.0, 0.5};
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::apply(big, op, v, out);
    else
      kernels::reference::apply(big, op, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(gemm<true>)->Name("gemm/omp")->Arg(16)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(gemm<false>)->Name("gemm/serial")->Arg(16)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(laplacian<true>)->Name("laplacian/omp")->Arg(16)->Arg(64)->Arg(128);
BENCHMARK(laplacian<false>)->Name("laplacian/serial")->Arg(16)->Arg(64)->Arg(128);
BENCHMARK(superop<true>)->Name("superop/omp")->Arg(8)->Arg(16)->Arg(24);
BENCHMARK(superop<false>)->Name("superop/serial")->Arg(8)->Arg(16)->Arg(24);
BENCHMARK(apply<true>)->Name("apply/omp")->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(apply<false>)->Name("apply/serial")->Arg(256)->Arg(1024)->Arg(2048);

BENCHMARK_MAIN();
