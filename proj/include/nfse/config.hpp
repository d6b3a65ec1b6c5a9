#pragma once

#include "nfse/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace nfse {

// Experiment configuration files are TOML. Tables and keys:
//
//   [geometry]   M, N, lambda_c, d, D
//                (d defaults to lambda_c/2, D to N*d + 8*lambda_c)
//   [channel]    L, r_min, max_abs_sin_theta, path_model = "on-grid" | "continuous"
//   [grid]       mode = "uniform" | "beta", T_theta (0 = N), step, r_min,
//                r_max (0 = Fraunhofer distance), beta, T_r,
//                aperture = "total" | "subarray-spacing"
//   [training]   Q, Q_sweep, snr_db, pilot_sweep_snr_db
//   [estimators] algorithms, K
//   [zalms]      mu, delta, alpha, units = "unnormalized-atoms" | "unit-atoms",
//                max_iters, rel_tolerance
//   [run]        trials, base_seed
//
// Every key is optional; omitted keys keep the defaults of
// ExperimentConfig. Unknown tables or keys are rejected.

/// Throws ErrorKind::Config on syntax errors, type errors, unknown keys or
/// a configuration that fails ExperimentConfig::validate().
ExperimentConfig parse_config(std::string_view toml_text, std::string_view source_name = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// The configuration rendered back to TOML (round-trips through parse_config).
std::string to_toml(const ExperimentConfig& cfg);

}  // namespace nfse
