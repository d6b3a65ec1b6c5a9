#pragma once

#include "nfse/channel.hpp"
#include "nfse/dictionary.hpp"
#include "nfse/measurement.hpp"
#include "nfse/numeric.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace nfse {

/// PD-ZALMS parameters. `attractor_step` is the stored delta; the
/// regularization weight delta' of the penalized cost relates to it through
/// delta = mu * delta' / 2 (see from_regularization).
struct ZalmsConfig {
  double step_size = 6e-5;       // mu
  double attractor_step = 5e-5;  // delta
  double sharpness = 25.0;       // alpha
  std::size_t max_iters = 5000;
  double rel_tolerance = 1e-6;

  void validate() const;

  static ZalmsConfig from_regularization(double step_size, double regularization, double sharpness);

  /// Parameters tuned for dictionary atoms of norm `atom_norm`, re-expressed
  /// for unit-norm atoms. Atoms a = s g give coefficients eta' = eta / s, and
  /// the update is reproduced exactly with mu s^2, delta s^2 and alpha / s.
  ZalmsConfig for_unit_norm_atoms(double atom_norm) const;
};

struct EstimateResult {
  CVector eta_hat;
  CVector h_hat;
  std::size_t iterations_run = 0;
  std::vector<double> residual_history;  // ||e(k)||_2, one entry per iteration
};

enum class Backend { Serial, Parallel };

/// alpha exp(-alpha |eta_i|) sgn(eta_i), with sgn(x) = x / |x| and sgn(0) = 0.
CVector attractor_gradient(std::span<const cdouble> eta, double alpha);

/// The PD-ZALMS iteration on (y, Psi) from eta(0) = 0:
///   e(k)   = y - Psi eta(k-1)
///   eta(k) = eta(k-1) + mu Psi^H e(k) - delta * attractor_gradient(eta(k-1))
/// Stops after max_iters or once ||eta(k) - eta(k-1)|| / max(||eta(k-1)||, eps)
/// falls below rel_tolerance. h_hat is left empty. Throws Divergence when
/// ||e(k)|| exceeds 1e6 ||y||. Working memory is O(rows + cols).
EstimateResult zalms_iterate(const ComplexMatrix& psi, std::span<const cdouble> y, const ZalmsConfig& cfg,
                             Backend backend = Backend::Parallel);

/// zalms_iterate on the measurement, then h_hat = G eta_hat.
EstimateResult pd_zalms(const MeasurementSet& m, const Dictionary& dictionary, const ZalmsConfig& cfg,
                        Backend backend = Backend::Parallel);

struct OmpResult {
  std::vector<std::size_t> support;  // selection order
  CVector coefficients;              // aligned with support
  std::vector<double> residual_norms;
};

/// Orthogonal matching pursuit with K iterations. Each step picks the
/// unselected column maximizing |a_j^H r| / ||a_j|| (ties to the smaller
/// index) and refits all selected columns by least squares. Stops early
/// only when the residual is numerically zero.
OmpResult omp(std::span<const cdouble> y, const ComplexMatrix& a, std::size_t sparsity);

/// OMP on (y, Psi) lifted back to the polar domain; h_hat = G eta_hat.
EstimateResult pd_omp(const MeasurementSet& m, const Dictionary& dictionary, std::size_t sparsity);

/// Independent OMP per subarray on (y_m, W_m^H A_m) with the far-field
/// dictionary A_m; h_hat stacks A_m eta_m. eta_hat stacks the M angular
/// coefficient vectors, so h_hat is not G eta_hat for this estimator.
EstimateResult mad_omp(std::span<const cdouble> y_tilde, const SamplingMatrix& sampling,
                       const std::vector<ComplexMatrix>& angular, std::size_t sparsity);

/// Least squares on the grid nodes nearest to the true paths (duplicates
/// merged); h_hat = G eta_hat.
EstimateResult oracle_ls(const MeasurementSet& m, const Dictionary& dictionary, const PathSet& true_paths);

}  // namespace nfse
