#include "nfse/kernels.hpp"

#ifdef NFSE_HAVE_OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cstddef>

namespace nfse::kernels {

namespace {

// std::complex<double> is layout-compatible with double[2]; working on the
// raw pairs avoids the Annex G NaN handling in operator*.
const double* raw(const cdouble* p) { return reinterpret_cast<const double*>(p); }
double* raw(cdouble* p) { return reinterpret_cast<double*>(p); }

void check_gemv(const ComplexMatrix& a, std::size_t xlen, std::size_t ylen) {
  if (xlen != a.cols() || ylen != a.rows()) throw Error(ErrorKind::InvalidArgument, "gemv: shape mismatch");
}

void check_gemv_adjoint(const ComplexMatrix& a, std::size_t xlen, std::size_t ylen) {
  if (xlen != a.rows() || ylen != a.cols()) throw Error(ErrorKind::InvalidArgument, "gemv_adjoint: shape mismatch");
}

// Rows [r0, r1) of y = A x, accumulating over columns in ascending order.
inline void gemv_rows(const ComplexMatrix& a, const double* x, double* y, std::size_t r0, std::size_t r1) {
  const std::size_t m = a.rows();
  const double* base = raw(a.data());
  for (std::size_t i = r0; i < r1; ++i) {
    y[2 * i] = 0.0;
    y[2 * i + 1] = 0.0;
  }
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double xr = x[2 * j];
    const double xi = x[2 * j + 1];
    const double* c = base + 2 * j * m;
    for (std::size_t i = r0; i < r1; ++i) {
      const double ar = c[2 * i];
      const double ai = c[2 * i + 1];
      y[2 * i] += ar * xr - ai * xi;
      y[2 * i + 1] += ar * xi + ai * xr;
    }
  }
}

// Four interleaved partial sums (lanes i mod 4) let the compiler keep the
// reduction in vector registers; the combination order is fixed.
inline void dot_conj_col(const ComplexMatrix& a, const double* x, double* y, std::size_t j) {
  const std::size_t m = a.rows();
  const double* c = raw(a.data()) + 2 * j * m;
  double re[4] = {0.0, 0.0, 0.0, 0.0};
  double im[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double ar = c[2 * (i + l)];
      const double ai = c[2 * (i + l) + 1];
      const double xr = x[2 * (i + l)];
      const double xi = x[2 * (i + l) + 1];
      re[l] += ar * xr + ai * xi;
      im[l] += ar * xi - ai * xr;
    }
  }
  for (std::size_t l = 0; i < m; ++i, ++l) {
    const double ar = c[2 * i];
    const double ai = c[2 * i + 1];
    re[l] += ar * x[2 * i] + ai * x[2 * i + 1];
    im[l] += ar * x[2 * i + 1] - ai * x[2 * i];
  }
  y[2 * j] = (re[0] + re[1]) + (re[2] + re[3]);
  y[2 * j + 1] = (im[0] + im[1]) + (im[2] + im[3]);
}

constexpr std::size_t kRowAlign = 4;

}  // namespace

namespace serial {

void gemv(const ComplexMatrix& a, std::span<const cdouble> x, std::span<cdouble> y) {
  check_gemv(a, x.size(), y.size());
  gemv_rows(a, raw(x.data()), raw(y.data()), 0, a.rows());
}

void gemv_adjoint(const ComplexMatrix& a, std::span<const cdouble> x, std::span<cdouble> y) {
  check_gemv_adjoint(a, x.size(), y.size());
  for (std::size_t j = 0; j < a.cols(); ++j) dot_conj_col(a, raw(x.data()), raw(y.data()), j);
}

}  // namespace serial

void gemv(const ComplexMatrix& a, std::span<const cdouble> x, std::span<cdouble> y) {
  check_gemv(a, x.size(), y.size());
  const double* xr = raw(x.data());
  double* yr = raw(y.data());
  [[maybe_unused]] const bool big = a.size() >= kParallelThreshold;
  // One contiguous row range per thread, aligned to kRowAlign rows, so each
  // thread streams the matrix once.
#pragma omp parallel if (big)
  {
    std::size_t nthreads = 1;
    std::size_t tid = 0;
#ifdef NFSE_HAVE_OPENMP
    nthreads = static_cast<std::size_t>(omp_get_num_threads());
    tid = static_cast<std::size_t>(omp_get_thread_num());
#endif
    const std::size_t chunk = ((a.rows() + nthreads - 1) / nthreads + kRowAlign - 1) / kRowAlign * kRowAlign;
    const std::size_t r0 = std::min(a.rows(), tid * chunk);
    const std::size_t r1 = std::min(a.rows(), r0 + chunk);
    if (r0 < r1) gemv_rows(a, xr, yr, r0, r1);
  }
}

void gemv_adjoint(const ComplexMatrix& a, std::span<const cdouble> x, std::span<cdouble> y) {
  check_gemv_adjoint(a, x.size(), y.size());
  const double* xr = raw(x.data());
  double* yr = raw(y.data());
  const auto n = static_cast<std::ptrdiff_t>(a.cols());
  [[maybe_unused]] const bool big = a.size() >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t j = 0; j < n; ++j) dot_conj_col(a, xr, yr, static_cast<std::size_t>(j));
}

int max_threads() {
#ifdef NFSE_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef NFSE_HAVE_OPENMP
  if (n >= 1) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace nfse::kernels
