// The parallel kernels must reproduce the serial reference bit for bit,
// whatever the thread count.
#include "nfse/kernels.hpp"

#include <doctest.h>

#include <cstring>

using namespace nfse;

namespace {

ComplexMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  ComplexMatrix a(rows, cols);
  const auto v = complex_gaussian(rng, rows * cols, 1.0);
  std::copy(v.begin(), v.end(), a.data());
  return a;
}

bool bit_equal(const CVector& a, const CVector& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cdouble)) == 0;
}

}  // namespace

TEST_CASE("parallel gemv is bit-identical to the serial reference") {
  Rng rng(101);
  for (auto [rows, cols] : {std::pair{120u, 1408u}, std::pair{7u, 3u}, std::pair{257u, 300u}, std::pair{33u, 2000u}}) {
    CAPTURE(rows);
    CAPTURE(cols);
    const auto a = random_matrix(rng, rows, cols);
    const auto x = complex_gaussian(rng, cols, 1.0);
    const auto xh = complex_gaussian(rng, rows, 1.0);
    CVector ref(rows), ref_h(cols);
    kernels::serial::gemv(a, x, ref);
    kernels::serial::gemv_adjoint(a, xh, ref_h);
    for (int threads : {1, 2, 3, 4}) {
      CAPTURE(threads);
      kernels::set_threads(threads);
      CVector y(rows), yh(cols);
      kernels::gemv(a, x, y);
      kernels::gemv_adjoint(a, xh, yh);
      CHECK(bit_equal(y, ref));
      CHECK(bit_equal(yh, ref_h));
    }
  }
  kernels::set_threads(kernels::max_threads());
}

TEST_CASE("gemv matches the dense product") {
  Rng rng(103);
  const auto a = random_matrix(rng, 9, 5);
  const auto x = complex_gaussian(rng, 5, 1.0);
  ComplexMatrix xm(5, 1);
  std::copy(x.begin(), x.end(), xm.data());
  const auto expected = multiply(a, xm);
  CVector y(9);
  kernels::gemv(a, x, y);
  for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(y[i] - expected(i, 0)) < 1e-13);

  const auto xh = complex_gaussian(rng, 9, 1.0);
  CVector yh(5);
  kernels::gemv_adjoint(a, xh, yh);
  for (std::size_t j = 0; j < 5; ++j) {
    cdouble acc{};
    for (std::size_t i = 0; i < 9; ++i) acc += std::conj(a(i, j)) * xh[i];
    CHECK(std::abs(yh[j] - acc) < 1e-13);
  }
}

TEST_CASE("gemv rejects mismatched shapes") {
  ComplexMatrix a(3, 2);
  CVector x(3), y(3);
  CHECK_THROWS_AS(kernels::gemv(a, x, y), Error);
  CVector xh(2), yh(2);
  CHECK_THROWS_AS(kernels::serial::gemv_adjoint(a, xh, yh), Error);
}
