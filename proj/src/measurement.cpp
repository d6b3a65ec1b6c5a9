#include "nfse/measurement.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nfse {

PilotMatrix build_pilots(std::size_t pilot_length, std::size_t num_users) {
  if (num_users == 0) throw Error(ErrorKind::InvalidArgument, "build_pilots: need at least one user");
  if (pilot_length < num_users) {
    throw Error(ErrorKind::InsufficientPilotLength, "build_pilots: pilot length " + std::to_string(pilot_length) +
                                                        " is shorter than the number of users " +
                                                        std::to_string(num_users));
  }
  PilotMatrix p{ComplexMatrix(pilot_length, num_users)};
  const double q = static_cast<double>(pilot_length);
  for (std::size_t u = 0; u < num_users; ++u) {
    for (std::size_t k = 0; k < pilot_length; ++k) {
      // Reduce k*u mod Q first so the angle stays small and exact.
      const auto idx = static_cast<double>((k * u) % pilot_length);
      p.P(k, u) = std::polar(1.0, -2.0 * std::numbers::pi * idx / q);
    }
  }
  return p;
}

ComplexMatrix SamplingMatrix::assembled() const {
  const std::size_t n = antennas_per_subarray();
  const std::size_t q = pilot_length();
  ComplexMatrix w(num_subarrays() * n, num_subarrays() * q);
  for (std::size_t m = 0; m < num_subarrays(); ++m)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t i = 0; i < n; ++i) w(m * n + i, m * q + j) = blocks[m](i, j);
  return w;
}

CVector SamplingMatrix::apply_adjoint(std::span<const cdouble> x) const {
  const std::size_t n = antennas_per_subarray();
  const std::size_t q = pilot_length();
  if (x.size() != num_subarrays() * n) throw Error(ErrorKind::InvalidArgument, "apply_adjoint: length != MN");
  CVector out(num_subarrays() * q);
  for (std::size_t m = 0; m < num_subarrays(); ++m) {
    for (std::size_t j = 0; j < q; ++j) {
      cdouble acc{};
      auto wcol = blocks[m].col(j);
      for (std::size_t i = 0; i < n; ++i) acc += std::conj(wcol[i]) * x[m * n + i];
      out[m * q + j] = acc;
    }
  }
  return out;
}

SamplingMatrix build_sampling_matrix(Rng& rng, const ArrayGeometry& geometry, std::size_t pilot_length) {
  const std::size_t n = geometry.antennas_per_subarray();
  if (pilot_length == 0 || pilot_length > n) {
    throw Error(ErrorKind::InvalidArgument, "build_sampling_matrix: need 1 <= Q <= N (Q = " +
                                                std::to_string(pilot_length) + ", N = " + std::to_string(n) + ")");
  }
  SamplingMatrix w;
  w.blocks.reserve(geometry.num_subarrays());
  for (std::size_t m = 0; m < geometry.num_subarrays(); ++m) {
    const ComplexMatrix u = random_unitary(rng, n);
    const ComplexMatrix v = random_unitary(rng, pilot_length);
    // U [I; 0] keeps the first Q columns of U.
    std::vector<std::size_t> first(pilot_length);
    for (std::size_t j = 0; j < pilot_length; ++j) first[j] = j;
    w.blocks.push_back(multiply(u.select_columns(first), v.adjoint()));
  }
  return w;
}

ComplexMatrix simulate_uplink(Rng& rng, const ComplexMatrix& channels, const PilotMatrix& pilots,
                              double noise_variance) {
  if (channels.cols() != pilots.num_users()) {
    throw Error(ErrorKind::InvalidArgument, "simulate_uplink: channel count differs from pilot count");
  }
  ComplexMatrix y = multiply(channels, pilots.P.adjoint());
  const auto z = complex_gaussian(rng, y.size(), noise_variance);
  for (std::size_t k = 0; k < y.size(); ++k) y.data()[k] += z[k];
  return y;
}

CVector post_process(const ComplexMatrix& received, const SamplingMatrix& sampling, std::span<const cdouble> pilot) {
  const std::size_t q = sampling.pilot_length();
  if (received.cols() != q || pilot.size() != q) {
    throw Error(ErrorKind::InvalidArgument, "post_process: pilot length mismatch");
  }
  if (received.rows() != sampling.num_subarrays() * sampling.antennas_per_subarray()) {
    throw Error(ErrorKind::InvalidArgument, "post_process: received rows != MN");
  }
  // Correlate with the pilot first (MN-vector), then combine per subarray.
  CVector yp(received.rows());
  for (std::size_t j = 0; j < q; ++j) {
    const cdouble pj = pilot[j];
    auto c = received.col(j);
    for (std::size_t i = 0; i < received.rows(); ++i) yp[i] += c[i] * pj;
  }
  const double inv_q = 1.0 / static_cast<double>(q);
  for (auto& v : yp) v *= inv_q;
  return sampling.apply_adjoint(yp);
}

ComplexMatrix sensing_matrix(const SamplingMatrix& sampling, const ComplexMatrix& dictionary) {
  const std::size_t n = sampling.antennas_per_subarray();
  const std::size_t q = sampling.pilot_length();
  const std::size_t m_count = sampling.num_subarrays();
  if (dictionary.rows() != m_count * n) throw Error(ErrorKind::InvalidArgument, "sensing_matrix: dictionary rows != MN");
  ComplexMatrix psi(m_count * q, dictionary.cols());
  const auto ncols = static_cast<std::ptrdiff_t>(dictionary.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < ncols; ++c) {
    const auto col = static_cast<std::size_t>(c);
    auto g = dictionary.col(col);
    for (std::size_t m = 0; m < m_count; ++m) {
      for (std::size_t j = 0; j < q; ++j) {
        auto w = sampling.blocks[m].col(j);
        cdouble acc{};
        for (std::size_t i = 0; i < n; ++i) acc += std::conj(w[i]) * g[m * n + i];
        psi(m * q + j, col) = acc;
      }
    }
  }
  return psi;
}

MeasurementSet measure_with_noise(const Channel& h, const SamplingMatrix& sampling, const Dictionary& dictionary,
                                  double snr, std::span<const cdouble> noise) {
  if (!(snr > 0.0)) throw Error(ErrorKind::InvalidArgument, "measure: snr must be > 0");
  MeasurementSet ms;
  ms.snr = snr;
  ms.noise_variance = std::isinf(snr) ? 0.0 : 1.0 / snr;
  ms.y_tilde = sampling.apply_adjoint(h.h);
  if (noise.size() != ms.y_tilde.size()) throw Error(ErrorKind::InvalidArgument, "measure: noise length != MQ");
  for (std::size_t k = 0; k < noise.size(); ++k) ms.y_tilde[k] += noise[k];
  ms.Psi = sensing_matrix(sampling, dictionary.G);
  return ms;
}

MeasurementSet measure(Rng& rng, const Channel& h, const SamplingMatrix& sampling, const Dictionary& dictionary,
                       double snr) {
  if (!(snr > 0.0)) throw Error(ErrorKind::InvalidArgument, "measure: snr must be > 0");
  const double sigma2 = std::isinf(snr) ? 0.0 : 1.0 / snr;
  const std::size_t mq = sampling.num_subarrays() * sampling.pilot_length();
  const auto noise = complex_gaussian(rng, mq, sigma2 / static_cast<double>(sampling.pilot_length()));
  return measure_with_noise(h, sampling, dictionary, snr, noise);
}

double db_to_linear(double db) {
  if (std::isinf(db) && db > 0) return std::numeric_limits<double>::infinity();
  return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace nfse
