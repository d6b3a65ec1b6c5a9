#pragma once

#include "nfse/channel.hpp"
#include "nfse/dictionary.hpp"
#include "nfse/estimators.hpp"
#include "nfse/geometry.hpp"
#include "nfse/measurement.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nfse {

enum class Algorithm { MadOmp, PdOmp, OracleLs, PdZalms };

std::string_view algorithm_name(Algorithm a);
/// Accepts mad-omp, pd-omp, oracle-ls, pd-zalms.
Algorithm parse_algorithm(std::string_view name);
std::vector<Algorithm> all_algorithms();

/// How channel paths are placed: anywhere in the angle/distance box, or on
/// nodes of the estimation grid.
enum class PathModel { OnGrid, Continuous };

/// Units in which the PD-ZALMS step sizes are stated. UnnormalizedAtoms
/// means the values assume dictionary atoms with unit-magnitude entries
/// (column norm sqrt(MN)); they are converted before running on the
/// unit-norm dictionary.
enum class ZalmsUnits { UnnormalizedAtoms, UnitAtoms };

enum class GridKind { Uniform, Beta };

struct ExperimentConfig {
  // Array.
  std::size_t M = 8;
  std::size_t N = 32;
  double lambda_c = 3e-3;
  double d = 1.5e-3;     // lambda_c / 2
  double D = 0.072;      // N d + 8 lambda_c

  // Channel.
  std::size_t L = 4;
  double r_min = kDefaultMinDistance;
  double max_abs_sin_theta = kMaxAbsSineOfAngle;
  PathModel path_model = PathModel::OnGrid;

  // Dictionary grid. num_angles = 0 means N (resolution 2/N).
  GridKind grid_kind = GridKind::Uniform;
  std::size_t num_angles = 0;
  double grid_step = 5.0;
  double grid_r_min = 5.0;
  double grid_r_max = 0.0;  // 0 means the Fraunhofer distance
  double beta = 1.2;
  std::size_t beta_rings = 8;
  ApertureChoice beta_aperture = ApertureChoice::TotalAperture;

  // Training.
  std::size_t Q = 15;
  std::vector<std::size_t> pilot_lengths{3, 6, 9, 12, 15, 18, 21, 24, 27, 30};
  std::vector<double> snr_db{-10, -5, 0, 5, 10, 15, 20, 25, 30, 35, 40};
  double pilot_sweep_snr_db = 15.0;

  // Estimators.
  std::vector<Algorithm> algorithms = all_algorithms();
  ZalmsConfig zalms{};
  ZalmsUnits zalms_units = ZalmsUnits::UnnormalizedAtoms;
  std::size_t K = 4;

  // Monte Carlo.
  std::size_t trials = 2000;
  std::uint64_t base_seed = 1;

  /// Throws ErrorKind::Config naming the violated constraint.
  void validate() const;
  /// PD-ZALMS parameters as applied to the unit-norm dictionary.
  ZalmsConfig effective_zalms() const;
  ArrayGeometry geometry() const;
  PolarGrid grid(const ArrayGeometry& geometry) const;
};

/// ||h - h_hat||^2 / ||h||^2. Throws UndefinedMetric for h = 0.
double nmse(const Channel& h, std::span<const cdouble> h_hat);

struct TrialResult {
  std::map<Algorithm, double> nmse;           // successful estimators
  std::map<Algorithm, std::string> failures;  // estimator -> error message
};

enum class SweepKind { Snr, PilotLength };

struct SweepRow {
  double sweep_value = 0.0;
  Algorithm algorithm = Algorithm::PdZalms;
  double nmse_linear = 0.0;
  double nmse_db = 0.0;
  std::size_t trials = 0;        // trials entering the mean
  double stderr_db = 0.0;
  std::size_t failed_trials = 0;
};

struct SweepResult {
  SweepKind kind = SweepKind::Snr;
  std::vector<SweepRow> rows;  // sorted by (sweep_value, algorithm name)

  const SweepRow* find(double sweep_value, Algorithm a) const;
};

/// Seed of one trial; depends only on (base_seed, snr_db, Q, trial_index).
std::uint64_t trial_seed(std::uint64_t base_seed, double snr_db, std::size_t pilot_length, std::size_t trial_index);

/// Holds everything that is fixed across trials (geometry, grid,
/// dictionaries) so sweeps build them once. Immutable after construction
/// and safe to share between worker threads.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);

  const ExperimentConfig& config() const noexcept { return cfg_; }
  const ArrayGeometry& geometry() const noexcept { return geometry_; }
  const Dictionary& dictionary() const noexcept { return dictionary_; }

  /// One paired trial: paths, W and noise are drawn once from the derived
  /// seed and every configured estimator sees the same measurement.
  TrialResult run_trial(double snr_db, std::size_t pilot_length, std::size_t trial_index) const;

  SweepResult sweep_snr() const;
  SweepResult sweep_pilot_length() const;

 private:
  SweepResult sweep(SweepKind kind, const std::vector<double>& values) const;

  ExperimentConfig cfg_;
  ArrayGeometry geometry_;
  Dictionary dictionary_;
  std::vector<ComplexMatrix> angular_;
};

TrialResult run_trial(const ExperimentConfig& cfg, double snr_db, std::size_t pilot_length, std::size_t trial_index);
SweepResult sweep_snr(const ExperimentConfig& cfg);
SweepResult sweep_pilot_length(const ExperimentConfig& cfg);

/// Mean and standard error of the linear samples, reported in dB.
SweepRow aggregate(double sweep_value, Algorithm a, std::span<const double> samples, std::size_t failed);

/// Applies NFSE_THREADS (if set and positive) to the worker pool.
void configure_threads_from_env();

}  // namespace nfse
