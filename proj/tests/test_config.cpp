#include "nfse/config.hpp"

#include <doctest.h>

#include <string>

using namespace nfse;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error for: " << text);
  return ErrorKind::InvalidArgument;
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("empty document yields the defaults") {
  const auto cfg = parse_config("");
  CHECK(to_toml(cfg) == to_toml(ExperimentConfig{}));
  CHECK(cfg.trials == 2000);
  CHECK(cfg.zalms.step_size == 6e-5);
}

TEST_CASE("shipped default config matches the built-in defaults") {
  const auto cfg = load_config(std::string(NFSE_SOURCE_DIR) + "/configs/default.toml");
  CHECK(to_toml(cfg) == to_toml(ExperimentConfig{}));
}

TEST_CASE("ci preset loads") {
  const auto cfg = load_config(std::string(NFSE_SOURCE_DIR) + "/configs/ci.toml");
  CHECK(cfg.trials == 100);
  CHECK(cfg.snr_db == std::vector<double>{-10, 0, 10, 15, 20, 30});
  CHECK(cfg.pilot_lengths == std::vector<std::size_t>{6, 15, 30});
}

TEST_CASE("to_toml round-trips") {
  ExperimentConfig cfg;
  cfg.M = 4;
  cfg.N = 16;
  cfg.d = 0.002;
  cfg.D = 0.05;
  cfg.path_model = PathModel::Continuous;
  cfg.grid_kind = GridKind::Beta;
  cfg.beta = 1.5;
  cfg.beta_rings = 3;
  cfg.beta_aperture = ApertureChoice::SubarraySpacing;
  cfg.Q = 7;
  cfg.pilot_lengths = {2, 7, 16};
  cfg.snr_db = {-2.5, 0.1, 33};
  cfg.algorithms = {Algorithm::PdZalms, Algorithm::MadOmp};
  cfg.zalms.step_size = 1.25e-4;
  cfg.zalms_units = ZalmsUnits::UnitAtoms;
  cfg.trials = 17;
  cfg.base_seed = 0xdeadbeefcafeULL;
  const auto text = to_toml(cfg);
  CHECK(to_toml(parse_config(text)) == text);
}

TEST_CASE("parameter names appear verbatim as keys") {
  const auto text = to_toml(ExperimentConfig{});
  for (const char* key : {"M = ", "N = ", "lambda_c = ", "d = ", "D = ", "L = ", "mu = ", "delta = ", "alpha = ",
                          "Q = ", "beta = ", "T_theta = ", "T_r = "}) {
    CAPTURE(key);
    CHECK(text.find(std::string("\n") + key) != std::string::npos);
  }
}

TEST_CASE("spacings default from the wavelength and N") {
  const auto cfg = parse_config("[geometry]\nN = 16\nlambda_c = 0.01\n[training]\nQ_sweep = [4, 8, 16]\n");
  CHECK(cfg.d == doctest::Approx(0.005));
  CHECK(cfg.D == doctest::Approx(16 * 0.005 + 0.08));
}

TEST_CASE("integers are accepted where reals are expected") {
  const auto cfg = parse_config("[channel]\nr_min = 10\n[training]\npilot_sweep_snr_db = 20\n");
  CHECK(cfg.r_min == 10.0);
  CHECK(cfg.pilot_sweep_snr_db == 20.0);
}

TEST_CASE("malformed documents are configuration errors") {
  CHECK(kind_of("[geometry\nM = 8") == ErrorKind::Config);
  CHECK(kind_of("[geometry]\nM = 8\nfoo = 1\n") == ErrorKind::Config);
  CHECK(message_of("[geometry]\nfoo = 1\n").find("geometry.foo") != std::string::npos);
  CHECK(kind_of("[extras]\nx = 1\n") == ErrorKind::Config);
  CHECK(kind_of("[geometry]\nM = \"eight\"\n") == ErrorKind::Config);
  CHECK(kind_of("[geometry]\nM = -1\n") == ErrorKind::Config);
  CHECK(kind_of("[training]\nsnr_db = [1, \"x\"]\n") == ErrorKind::Config);
  CHECK(kind_of("[estimators]\nalgorithms = [\"pd-omp\", \"lasso\"]\n") == ErrorKind::Config);
  CHECK(kind_of("[grid]\nmode = \"hexagonal\"\n") == ErrorKind::Config);
  CHECK(kind_of("geometry = 3\n") == ErrorKind::Config);
}

TEST_CASE("semantic violations name the constraint") {
  CHECK(message_of("[training]\nQ = 40\n").find("Q = 40") != std::string::npos);
  CHECK(message_of("[training]\nQ = 40\n").find("N = 32") != std::string::npos);
  CHECK(message_of("[geometry]\nD = 0.01\n").find("D must be >= N*d") != std::string::npos);
  CHECK(message_of("[run]\ntrials = 0\n").find("trials") != std::string::npos);
  CHECK(message_of("[training]\nsnr_db = []\n").find("SNR") != std::string::npos);
}

TEST_CASE("missing file is a configuration error") {
  try {
    load_config("/nonexistent/nfse.toml");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}
