#include "nfse/numeric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nfse {

namespace {

using EigenMat = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
using EigenVec = Eigen::Matrix<cdouble, Eigen::Dynamic, 1>;

Eigen::Map<const EigenMat> as_eigen(const ComplexMatrix& m) {
  return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidRange: return "invalid-range";
    case ErrorKind::OverlappingSubarrays: return "overlapping-subarrays";
    case ErrorKind::InsufficientPilotLength: return "insufficient-pilot-length";
    case ErrorKind::RankDeficient: return "rank-deficiency";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::UndefinedMetric: return "undefined-metric";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorKind::InvalidArgument, "ComplexMatrix: dimensions must be positive");
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::select_columns(std::span<const std::size_t> indices) const {
  ComplexMatrix out(rows_, indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= cols_) throw Error(ErrorKind::InvalidArgument, "select_columns: index out of range");
    std::ranges::copy(col(indices[k]), out.col(k).begin());
  }
  return out;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::InvalidArgument, "multiply: inner dimensions differ");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto dst = out.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cdouble s = b(k, j);
      if (s == cdouble{}) continue;
      auto src = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) dst[i] += src[i] * s;
    }
  }
  return out;
}

ComplexMatrix adjoint_multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::InvalidArgument, "adjoint_multiply: row counts differ");
  ComplexMatrix out(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto bj = b.col(j);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      auto ai = a.col(i);
      cdouble acc{};
      for (std::size_t k = 0; k < a.rows(); ++k) acc += std::conj(ai[k]) * bj[k];
      out(i, j) = acc;
    }
  }
  return out;
}

double squared_norm(std::span<const cdouble> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return s;
}

double norm2(std::span<const cdouble> x) { return std::sqrt(squared_norm(x)); }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::InvalidArgument, "max_abs_diff: shape mismatch");
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = mix64(base);
  for (auto w : words) h = mix64(h ^ mix64(w));
  return h;
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    s = z ^ (z >> 31);
  }
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "Rng::index: empty range");
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

CVector complex_gaussian(Rng& rng, std::size_t n, double variance) {
  if (!(variance >= 0.0)) throw Error(ErrorKind::InvalidArgument, "complex_gaussian: variance must be >= 0");
  CVector out(n);
  if (variance == 0.0) return out;
  const double s = std::sqrt(variance / 2.0);
  for (auto& z : out) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = {s * re, s * im};
  }
  return out;
}

ComplexMatrix random_unitary(Rng& rng, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "random_unitary: n must be >= 1");
  ComplexMatrix g(n, n);
  auto z = complex_gaussian(rng, n * n, 1.0);
  std::ranges::copy(z, g.data());

  Eigen::HouseholderQR<EigenMat> qr(as_eigen(g));
  EigenMat q = qr.householderQ();
  const EigenMat& r = qr.matrixQR();
  ComplexMatrix out(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const cdouble d = r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    const double mag = std::abs(d);
    const cdouble phase = mag > 0.0 ? d / mag : cdouble{1.0};
    for (std::size_t i = 0; i < n; ++i) {
      out(i, j) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * phase;
    }
  }
  return out;
}

CVector ls_solve(const ComplexMatrix& a, std::span<const cdouble> b) {
  if (b.size() != a.rows()) throw Error(ErrorKind::InvalidArgument, "ls_solve: rhs length differs from rows(A)");
  if (a.rows() < a.cols()) throw Error(ErrorKind::InvalidArgument, "ls_solve: system is under-determined");

  const auto am = as_eigen(a);
  Eigen::ColPivHouseholderQR<EigenMat> qr(am);
  const auto k = static_cast<Eigen::Index>(a.cols());
  // Singular values of A equal those of the k x k triangular factor.
  EigenMat rfac = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<EigenMat> svd(rfac);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(k - 1);
  if (!(smax > 0.0) || smin / smax < kRankTolerance) {
    throw Error(ErrorKind::RankDeficient,
                "ls_solve: matrix is rank deficient (sigma_min/sigma_max = " + std::to_string(smax > 0 ? smin / smax : 0.0) +
                    ")");
  }
  Eigen::Map<const EigenVec> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  EigenVec x = qr.solve(bv);
  return CVector(x.data(), x.data() + x.size());
}

}  // namespace nfse
