#include "nfse/harness.hpp"

#include "nfse/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

namespace nfse {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::Config, what); }

ExperimentConfig validated(ExperimentConfig cfg) {
  cfg.validate();
  return cfg;
}

constexpr std::uint64_t kSnrTag = 0x534e52;  // "SNR"

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::MadOmp: return "mad-omp";
    case Algorithm::PdOmp: return "pd-omp";
    case Algorithm::OracleLs: return "oracle-ls";
    case Algorithm::PdZalms: return "pd-zalms";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : all_algorithms())
    if (algorithm_name(a) == name) return a;
  config_error("unknown algorithm '" + std::string(name) + "' (expected mad-omp, pd-omp, oracle-ls or pd-zalms)");
}

std::vector<Algorithm> all_algorithms() {
  return {Algorithm::MadOmp, Algorithm::PdOmp, Algorithm::OracleLs, Algorithm::PdZalms};
}

void ExperimentConfig::validate() const {
  if (M < 1 || N < 1) config_error("M and N must be >= 1");
  if (!(lambda_c > 0.0)) config_error("lambda_c must be > 0");
  if (!(d > 0.0)) config_error("d must be > 0");
  if (!(D >= static_cast<double>(N) * d * (1.0 - 1e-12))) config_error("D must be >= N*d (subarrays may not overlap)");
  if (L < 1) config_error("L must be >= 1");
  if (!(max_abs_sin_theta > 0.0 && max_abs_sin_theta <= 1.0)) config_error("max_abs_sin_theta must be in (0, 1]");
  const double rfd = 2.0 * std::pow(static_cast<double>(M) * D, 2) / lambda_c;
  if (!(r_min > 0.0 && r_min < rfd)) config_error("channel r_min must be in (0, Fraunhofer distance)");
  if (grid_kind == GridKind::Uniform) {
    const double rmax = grid_r_max > 0.0 ? grid_r_max : rfd;
    if (!(grid_step > 0.0) || !(grid_r_min > 0.0) || !(rmax >= grid_r_min)) {
      config_error("uniform grid needs step > 0 and 0 < r_min <= r_max");
    }
  } else {
    if (!(beta > 0.0)) config_error("beta must be > 0");
    if (beta_rings < 1) config_error("T_r must be >= 1 in beta mode");
  }
  if (Q < 1 || Q > N) config_error("pilot length Q = " + std::to_string(Q) + " must satisfy 1 <= Q <= N = " +
                                   std::to_string(N));
  for (auto q : pilot_lengths) {
    if (q < 1 || q > N) {
      config_error("pilot length Q = " + std::to_string(q) + " in the pilot sweep must satisfy 1 <= Q <= N = " +
                   std::to_string(N));
    }
  }
  if (snr_db.empty()) config_error("SNR list must not be empty");
  if (pilot_lengths.empty()) config_error("pilot-length list must not be empty");
  if (algorithms.empty()) config_error("algorithm list must not be empty");
  if (K < 1) config_error("K must be >= 1");
  if (trials < 1) config_error("trials must be >= 1");
  try {
    zalms.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
}

ZalmsConfig ExperimentConfig::effective_zalms() const {
  if (zalms_units == ZalmsUnits::UnitAtoms) return zalms;
  return zalms.for_unit_norm_atoms(std::sqrt(static_cast<double>(M * N)));
}

ArrayGeometry ExperimentConfig::geometry() const { return ArrayGeometry::build(M, N, d, D, lambda_c); }

PolarGrid ExperimentConfig::grid(const ArrayGeometry& g) const {
  const std::size_t t = num_angles == 0 ? N : num_angles;
  if (grid_kind == GridKind::Beta) return PolarGrid::build(g, t, BetaRule{beta, beta_rings, beta_aperture});
  const double rmax = grid_r_max > 0.0 ? grid_r_max : fraunhofer_distance(g);
  return PolarGrid::build(g, t, UniformDistances{grid_step, grid_r_min, rmax});
}

double nmse(const Channel& h, std::span<const cdouble> h_hat) {
  if (h.h.size() != h_hat.size()) throw Error(ErrorKind::InvalidArgument, "nmse: length mismatch");
  const double denom = squared_norm(h.h);
  if (!(denom > 0.0)) throw Error(ErrorKind::UndefinedMetric, "nmse: the true channel is zero");
  double num = 0.0;
  for (std::size_t i = 0; i < h_hat.size(); ++i) num += std::norm(h.h[i] - h_hat[i]);
  return num / denom;
}

const SweepRow* SweepResult::find(double sweep_value, Algorithm a) const {
  for (const auto& r : rows)
    if (r.sweep_value == sweep_value && r.algorithm == a) return &r;
  return nullptr;
}

std::uint64_t trial_seed(std::uint64_t base_seed, double snr_db, std::size_t pilot_length, std::size_t trial_index) {
  return derive_seed(base_seed, {kSnrTag, std::bit_cast<std::uint64_t>(snr_db), pilot_length, trial_index});
}

Experiment::Experiment(ExperimentConfig cfg)
    : cfg_(validated(std::move(cfg))),
      geometry_(cfg_.geometry()),
      dictionary_(build_polar_dictionary(geometry_, cfg_.grid(geometry_))),
      angular_(build_angular_dictionary(geometry_, dictionary_.grid.num_angles())) {}

TrialResult Experiment::run_trial(double snr_db, std::size_t pilot_length, std::size_t trial_index) const {
  if (pilot_length < 1 || pilot_length > cfg_.N) {
    config_error("pilot length Q = " + std::to_string(pilot_length) + " must satisfy 1 <= Q <= N");
  }
  Rng rng(trial_seed(cfg_.base_seed, snr_db, pilot_length, trial_index));

  // Draw order is fixed (paths, W, noise) and independent of the algorithm
  // list, so every estimator and every subset of estimators sees the same
  // measurement for a given seed.
  const PathSet paths = cfg_.path_model == PathModel::OnGrid
                            ? sample_grid_paths(rng, cfg_.L, geometry_, dictionary_.grid, cfg_.r_min,
                                                cfg_.max_abs_sin_theta)
                            : sample_paths(rng, cfg_.L, geometry_, cfg_.r_min, cfg_.max_abs_sin_theta);
  const Channel h = synthesize_channel(geometry_, paths);
  const SamplingMatrix w = build_sampling_matrix(rng, geometry_, pilot_length);
  const MeasurementSet ms = measure(rng, h, w, dictionary_, db_to_linear(snr_db));

  TrialResult out;
  for (const Algorithm a : cfg_.algorithms) {
    try {
      EstimateResult est;
      switch (a) {
        case Algorithm::MadOmp:
          est = mad_omp(ms.y_tilde, w, angular_, std::min(cfg_.K, pilot_length));
          break;
        case Algorithm::PdOmp:
          est = pd_omp(ms, dictionary_, cfg_.K);
          break;
        case Algorithm::OracleLs:
          est = oracle_ls(ms, dictionary_, paths);
          break;
        case Algorithm::PdZalms:
          est = pd_zalms(ms, dictionary_, cfg_.effective_zalms());
          break;
      }
      out.nmse[a] = nmse(h, est.h_hat);
    } catch (const Error& e) {
      out.failures[a] = e.what();
    }
  }
  return out;
}

SweepRow aggregate(double sweep_value, Algorithm a, std::span<const double> samples, std::size_t failed) {
  SweepRow row;
  row.sweep_value = sweep_value;
  row.algorithm = a;
  row.trials = samples.size();
  row.failed_trials = failed;
  if (samples.empty()) {
    row.nmse_linear = std::numeric_limits<double>::quiet_NaN();
    row.nmse_db = row.nmse_linear;
    row.stderr_db = row.nmse_linear;
    return row;
  }
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double n = static_cast<double>(samples.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double se = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  row.nmse_linear = mean;
  row.nmse_db = linear_to_db(mean);
  // Delta method: d(10 log10 x) = 10 / (x ln 10) dx.
  row.stderr_db = mean > 0.0 ? 10.0 / std::numbers::ln10 * se / mean : 0.0;
  return row;
}

SweepResult Experiment::sweep(SweepKind kind, const std::vector<double>& values) const {
  const std::size_t trials = cfg_.trials;
  std::vector<double> sorted_values = values;
  std::ranges::sort(sorted_values);

  struct Cell {
    std::vector<double> samples;
    std::size_t failed = 0;
  };
  SweepResult result;
  result.kind = kind;

  for (const double v : sorted_values) {
    const double snr = kind == SweepKind::Snr ? v : cfg_.pilot_sweep_snr_db;
    const std::size_t q = kind == SweepKind::Snr ? cfg_.Q : static_cast<std::size_t>(v);

    std::vector<TrialResult> per_trial(trials);
    const auto n = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      per_trial[static_cast<std::size_t>(i)] = run_trial(snr, q, static_cast<std::size_t>(i));
    }

    // Reduction in trial order keeps the output independent of scheduling.
    std::map<std::string_view, std::pair<Algorithm, Cell>> cells;
    for (const Algorithm a : cfg_.algorithms) cells.emplace(algorithm_name(a), std::pair{a, Cell{}});
    for (const auto& tr : per_trial) {
      for (auto& [name, entry] : cells) {
        auto& [a, cell] = entry;
        if (auto it = tr.nmse.find(a); it != tr.nmse.end()) {
          cell.samples.push_back(it->second);
        } else {
          ++cell.failed;
        }
      }
    }
    for (const auto& [name, entry] : cells) {
      const auto& [a, cell] = entry;
      result.rows.push_back(aggregate(v, a, cell.samples, cell.failed));
    }
  }
  return result;
}

SweepResult Experiment::sweep_snr() const { return sweep(SweepKind::Snr, cfg_.snr_db); }

SweepResult Experiment::sweep_pilot_length() const {
  std::vector<double> qs(cfg_.pilot_lengths.begin(), cfg_.pilot_lengths.end());
  return sweep(SweepKind::PilotLength, qs);
}

TrialResult run_trial(const ExperimentConfig& cfg, double snr_db, std::size_t pilot_length, std::size_t trial_index) {
  return Experiment(cfg).run_trial(snr_db, pilot_length, trial_index);
}

SweepResult sweep_snr(const ExperimentConfig& cfg) { return Experiment(cfg).sweep_snr(); }

SweepResult sweep_pilot_length(const ExperimentConfig& cfg) { return Experiment(cfg).sweep_pilot_length(); }

void configure_threads_from_env() {
  if (const char* env = std::getenv("NFSE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) kernels::set_threads(static_cast<int>(n));
  }
}

}  // namespace nfse
