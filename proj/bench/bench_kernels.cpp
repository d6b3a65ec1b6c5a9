// Serial reference kernels against their OpenMP counterparts, on the shapes
// PD-ZALMS sees: Psi is (M Q) x (T_theta S) with M = 8.

#include "nfse/estimators.hpp"
#include "nfse/kernels.hpp"
#include "nfse/numeric.hpp"

#include <benchmark/benchmark.h>

#include <cstddef>

namespace {

using nfse::cdouble;
using nfse::ComplexMatrix;
using nfse::CVector;

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols) {
  nfse::Rng rng(rows * 7919 + cols);
  ComplexMatrix a(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) a(i, j) = cdouble(rng.normal(), rng.normal());
  return a;
}

CVector random_vector(std::size_t n) {
  nfse::Rng rng(n);
  return nfse::complex_gaussian(rng, n, 1.0);
}

template <bool Parallel>
void BM_gemv(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto cols = static_cast<std::size_t>(state.range(1));
  const auto a = random_matrix(rows, cols);
  const auto x = random_vector(cols);
  CVector y(rows);
  for (auto _ : state) {
    if constexpr (Parallel) {
      nfse::kernels::gemv(a, x, y);
    } else {
      nfse::kernels::serial::gemv(a, x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * cols));
}

template <bool Parallel>
void BM_gemv_adjoint(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto cols = static_cast<std::size_t>(state.range(1));
  const auto a = random_matrix(rows, cols);
  const auto x = random_vector(rows);
  CVector y(cols);
  for (auto _ : state) {
    if constexpr (Parallel) {
      nfse::kernels::gemv_adjoint(a, x, y);
    } else {
      nfse::kernels::serial::gemv_adjoint(a, x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * cols));
}

// A fixed number of full PD-ZALMS iterations (tolerance disabled).
void BM_zalms(benchmark::State& state) {
  const auto backend = state.range(0) != 0 ? nfse::Backend::Parallel : nfse::Backend::Serial;
  auto psi = random_matrix(8 * 15, 32 * 44);
  for (std::size_t j = 0; j < psi.cols(); ++j) {
    const double n = nfse::norm2(psi.col(j));
    for (auto& v : psi.col(j)) v /= n;
  }
  const auto y = random_vector(psi.rows());
  nfse::ZalmsConfig cfg;
  cfg.step_size = 1e-3;
  cfg.max_iters = 50;
  cfg.rel_tolerance = 0.0;
  for (auto _ : state) {
    auto r = nfse::zalms_iterate(psi, y, cfg, backend);
    benchmark::DoNotOptimize(r.eta_hat.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.max_iters));
}

void shapes(benchmark::internal::Benchmark* b) {
  for (const long q : {6L, 15L, 30L}) b->Args({8 * q, 32 * 44});
  b->Args({8 * 30, 64 * 44});
}

}  // namespace

BENCHMARK(BM_gemv<false>)->Name("gemv/serial")->Apply(shapes);
BENCHMARK(BM_gemv<true>)->Name("gemv/parallel")->Apply(shapes)->UseRealTime();
BENCHMARK(BM_gemv_adjoint<false>)->Name("gemv_adjoint/serial")->Apply(shapes);
BENCHMARK(BM_gemv_adjoint<true>)->Name("gemv_adjoint/parallel")->Apply(shapes)->UseRealTime();
BENCHMARK(BM_zalms)->Name("zalms_50_iterations")->Arg(0)->Arg(1)->UseRealTime();

BENCHMARK_MAIN();
