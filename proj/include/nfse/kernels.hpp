#pragma once

// Dense complex matrix-vector kernels used on every PD-ZALMS iteration.
//
// The `serial` namespace holds the reference implementation. The functions
// at namespace scope are the OpenMP versions; they partition work so that
// every output element is accumulated in the same order as the reference,
// which makes the two bit-identical for any thread count.

#include "nfse/numeric.hpp"

#include <span>

namespace nfse::kernels {

namespace serial {

/// y = A x
void gemv(const ComplexMatrix& a, std::span<const cdouble> x, std::span<cdouble> y);
/// y = A^H x
void gemv_adjoint(const ComplexMatrix& a, std::span<const cdouble> x, std::span<cdouble> y);

}  // namespace serial

void gemv(const ComplexMatrix& a, std::span<const cdouble> x, std::span<cdouble> y);
void gemv_adjoint(const ComplexMatrix& a, std::span<const cdouble> x, std::span<cdouble> y);

/// Below this many matrix entries the parallel kernels run on one thread.
inline constexpr std::size_t kParallelThreshold = 1 << 15;

int max_threads();
void set_threads(int n);

}  // namespace nfse::kernels
