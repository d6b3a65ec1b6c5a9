#include "nfse/cli.hpp"

#include "nfse/config.hpp"
#include "nfse/csv.hpp"
#include "nfse/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace nfse {

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out_path;
  std::vector<std::string> algorithms;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_out) {
  cmd->add_option("--config", o.config_path, "TOML experiment configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Base seed (overrides run.base_seed)");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials per point (overrides run.trials)");
  cmd->add_option("--algorithms", o.algorithms, "Comma-separated estimator list")->delimiter(',');
  if (with_out) cmd->add_option("--out", o.out_path, "Output CSV path (default: stdout)");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (!o.algorithms.empty()) {
    cfg.algorithms.clear();
    for (const auto& name : o.algorithms) cfg.algorithms.push_back(parse_algorithm(name));
  }
  cfg.validate();
  return cfg;
}

void emit(const SweepResult& result, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    write_csv(out, result);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  write_csv(file, result);
  if (!file) throw std::runtime_error("failed writing " + path);
}

std::string g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Near-field XL-MIMO sparse channel estimation simulator", "nfse"};
  app.require_subcommand(1);

  Overrides o;
  double snr_db = 15.0;
  std::optional<std::size_t> pilot_length;
  std::size_t trial_index = 0;

  CLI::App* snr = app.add_subcommand("sweep-snr", "NMSE versus SNR at the configured pilot length");
  add_common(snr, o, true);
  CLI::App* pilot = app.add_subcommand("sweep-pilot", "NMSE versus pilot length at the configured SNR");
  add_common(pilot, o, true);
  CLI::App* est = app.add_subcommand("estimate", "Run a single trial and print the NMSE of each estimator");
  add_common(est, o, false);
  est->add_option("--snr-db", snr_db, "SNR in dB")->capture_default_str();
  est->add_option("--pilot-length", pilot_length, "Pilot length Q (default: training.Q)");
  est->add_option("--trial-index", trial_index, "Trial index fed to the seed derivation")->capture_default_str();
  CLI::App* check = app.add_subcommand("validate-config", "Check a configuration and print it with defaults filled in");
  add_common(check, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "nfse: " << e.what() << "\n" << "Run with --help for usage.\n";
    return kExitUsage;
  }

  ExperimentConfig cfg;
  try {
    cfg = resolve(o);
  } catch (const Error& e) {
    err << "nfse: configuration error: " << e.what() << "\n";
    return kExitUsage;
  }

  configure_threads_from_env();

  try {
    if (*check) {
      out << "# configuration is valid\n" << to_toml(cfg);
    } else if (*snr) {
      emit(sweep_snr(cfg), o.out_path, out);
    } else if (*pilot) {
      emit(sweep_pilot_length(cfg), o.out_path, out);
    } else if (*est) {
      const std::size_t q = pilot_length.value_or(cfg.Q);
      if (q < 1 || q > cfg.N) {
        err << "nfse: configuration error: pilot length Q = " << q << " must satisfy 1 <= Q <= N = " << cfg.N << "\n";
        return kExitUsage;
      }
      const TrialResult r = run_trial(cfg, snr_db, q, trial_index);
      out << "algorithm,nmse_linear,nmse_db\n";
      for (const Algorithm a : cfg.algorithms) {
        out << algorithm_name(a) << ',';
        if (auto it = r.nmse.find(a); it != r.nmse.end()) {
          out << g9(it->second) << ',' << g9(linear_to_db(it->second)) << '\n';
        } else {
          out << "nan,nan\n";
          err << "nfse: " << algorithm_name(a) << " failed: " << r.failures.at(a) << "\n";
        }
      }
    }
  } catch (const Error& e) {
    err << "nfse: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::Config ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "nfse: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace nfse
