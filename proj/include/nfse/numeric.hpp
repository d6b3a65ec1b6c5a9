#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfse {

using cdouble = std::complex<double>;
using CVector = std::vector<cdouble>;

enum class ErrorKind {
  InvalidArgument,
  InvalidRange,
  OverlappingSubarrays,
  InsufficientPilotLength,
  RankDeficient,
  Divergence,
  UndefinedMetric,
  Config,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the sweep harness in particular) can decide what is recoverable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Dense complex matrix, column-major. Column j occupies
/// data()[j*rows() .. (j+1)*rows()). This storage order is used everywhere
/// in the library; the kernels rely on it.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  cdouble& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const cdouble& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<cdouble> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const cdouble> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  cdouble* data() noexcept { return data_.data(); }
  const cdouble* data() const noexcept { return data_.data(); }

  ComplexMatrix adjoint() const;
  /// Columns listed in `indices`, in that order.
  ComplexMatrix select_columns(std::span<const std::size_t> indices) const;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> data_;
};

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
/// a^H * b without materializing a^H.
ComplexMatrix adjoint_multiply(const ComplexMatrix& a, const ComplexMatrix& b);

double squared_norm(std::span<const cdouble> x);
double norm2(std::span<const cdouble> x);
/// Largest |a(i,j) - b(i,j)|; shapes must match.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// xoshiro256** seeded through splitmix64. Uniform doubles take the top
/// 53 bits; normals come from Box-Muller with no cached second variate, so
/// the stream consumed per call is fixed (two words per normal).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal.
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

/// splitmix64 finalizer; used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x);
/// Order-sensitive hash of a seed with any number of 64-bit words.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words);

/// n samples of CN(0, variance): real and imaginary parts are independent
/// N(0, variance/2).
CVector complex_gaussian(Rng& rng, std::size_t n, double variance);

/// Haar-distributed unitary: QR of an i.i.d. CN(0,1) matrix with the
/// diagonal of R rotated onto the positive reals.
ComplexMatrix random_unitary(Rng& rng, std::size_t n);

/// Relative singular-value threshold below which ls_solve refuses to solve.
inline constexpr double kRankTolerance = 1e-10;

/// argmin_x ||A x - b||_2 through a column-pivoted Householder QR. Throws
/// ErrorKind::RankDeficient when sigma_min / sigma_max < kRankTolerance.
CVector ls_solve(const ComplexMatrix& a, std::span<const cdouble> b);

}  // namespace nfse
