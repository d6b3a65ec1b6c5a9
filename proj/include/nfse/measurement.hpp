#pragma once

#include "nfse/channel.hpp"
#include "nfse/dictionary.hpp"
#include "nfse/geometry.hpp"
#include "nfse/numeric.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace nfse {

/// Q x U orthogonal pilots: P^H P = Q I.
struct PilotMatrix {
  ComplexMatrix P;

  std::size_t length() const noexcept { return P.rows(); }
  std::size_t num_users() const noexcept { return P.cols(); }
};

/// First U columns of the Q-point DFT matrix. Throws
/// InsufficientPilotLength when Q < U.
PilotMatrix build_pilots(std::size_t pilot_length, std::size_t num_users);

/// Per-subarray analog combiners W_m (N x Q, orthonormal columns) and their
/// block-diagonal assembly W (MN x MQ).
struct SamplingMatrix {
  std::vector<ComplexMatrix> blocks;

  std::size_t num_subarrays() const noexcept { return blocks.size(); }
  std::size_t antennas_per_subarray() const { return blocks.front().rows(); }
  std::size_t pilot_length() const { return blocks.front().cols(); }

  ComplexMatrix assembled() const;
  /// W^H x for an MN-vector x, block by block.
  CVector apply_adjoint(std::span<const cdouble> x) const;
};

/// W_m = U_m [I_Q; 0] V_m^H with independent Haar unitaries U_m (N x N) and
/// V_m (Q x Q) for every subarray.
SamplingMatrix build_sampling_matrix(Rng& rng, const ArrayGeometry& geometry, std::size_t pilot_length);

/// Y = H P^H + Z, Z i.i.d. CN(0, noise_variance). H is MN x U.
ComplexMatrix simulate_uplink(Rng& rng, const ComplexMatrix& channels, const PilotMatrix& pilots, double noise_variance);

/// (1/Q) W^H Y p_u, computed subarray by subarray and stacked. The 1/Q
/// undoes the pilot energy so the signal term is exactly W^H h_u.
CVector post_process(const ComplexMatrix& received, const SamplingMatrix& sampling, std::span<const cdouble> pilot);

struct MeasurementSet {
  CVector y_tilde;       // MQ
  ComplexMatrix Psi;     // MQ x (T_theta T_r) = W^H G
  double noise_variance;  // sigma^2 = 1 / snr
  double snr;             // linear
};

/// W^H G, computed block-wise.
ComplexMatrix sensing_matrix(const SamplingMatrix& sampling, const ComplexMatrix& dictionary);

/// Single-user observation y = W^H h + z with z ~ CN(0, sigma^2 / Q) per
/// entry and sigma^2 = 1 / snr. snr = +inf gives a noiseless observation.
MeasurementSet measure(Rng& rng, const Channel& h, const SamplingMatrix& sampling, const Dictionary& dictionary,
                       double snr);

/// Same as measure() with the post-processed noise vector supplied.
MeasurementSet measure_with_noise(const Channel& h, const SamplingMatrix& sampling, const Dictionary& dictionary,
                                  double snr, std::span<const cdouble> noise);

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace nfse
