#include "nfse/config.hpp"

#include <toml.hpp>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace nfse {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::Config, what); }

class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  void check_keys(const std::set<std::string>& allowed) const {
    if (!table_) return;
    for (const auto& [key, node] : *table_) {
      if (!allowed.contains(std::string(key.str()))) fail("unknown key '" + name_ + "." + std::string(key.str()) + "'");
    }
  }

  bool has(const char* key) const { return table_ && table_->contains(key); }

  double real(const char* key, double fallback) const {
    const toml::node* n = node(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<double>()) return *v;
    if (auto v = n->value_exact<std::int64_t>()) return static_cast<double>(*v);
    fail(where(key) + " must be a number");
  }

  std::size_t count(const char* key, std::size_t fallback) const {
    const toml::node* n = node(key);
    if (!n) return fallback;
    auto v = n->value_exact<std::int64_t>();
    if (!v || *v < 0) fail(where(key) + " must be a non-negative integer");
    return static_cast<std::size_t>(*v);
  }

  std::string text(const char* key, const std::string& fallback) const {
    const toml::node* n = node(key);
    if (!n) return fallback;
    auto v = n->value_exact<std::string>();
    if (!v) fail(where(key) + " must be a string");
    return *v;
  }

  std::vector<double> reals(const char* key, std::vector<double> fallback) const {
    const toml::node* n = node(key);
    if (!n) return fallback;
    const toml::array* arr = n->as_array();
    if (!arr) fail(where(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& el : *arr) {
      if (auto v = el.value_exact<double>()) {
        out.push_back(*v);
      } else if (auto i = el.value_exact<std::int64_t>()) {
        out.push_back(static_cast<double>(*i));
      } else {
        fail(where(key) + " must be an array of numbers");
      }
    }
    return out;
  }

  std::vector<std::size_t> counts(const char* key, std::vector<std::size_t> fallback) const {
    const toml::node* n = node(key);
    if (!n) return fallback;
    const toml::array* arr = n->as_array();
    if (!arr) fail(where(key) + " must be an array of integers");
    std::vector<std::size_t> out;
    for (const auto& el : *arr) {
      auto v = el.value_exact<std::int64_t>();
      if (!v || *v < 0) fail(where(key) + " must be an array of non-negative integers");
      out.push_back(static_cast<std::size_t>(*v));
    }
    return out;
  }

  std::vector<std::string> texts(const char* key, std::vector<std::string> fallback) const {
    const toml::node* n = node(key);
    if (!n) return fallback;
    const toml::array* arr = n->as_array();
    if (!arr) fail(where(key) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& el : *arr) {
      auto v = el.value_exact<std::string>();
      if (!v) fail(where(key) + " must be an array of strings");
      out.push_back(*v);
    }
    return out;
  }

 private:
  const toml::node* node(const char* key) const { return table_ ? table_->get(key) : nullptr; }
  std::string where(const char* key) const { return "'" + name_ + "." + key + "'"; }

  const toml::table* table_;
  std::string name_;
};

Section section(const toml::table& root, const char* name) {
  const toml::node* n = root.get(name);
  if (n && !n->is_table()) fail(std::string("'") + name + "' must be a table");
  return Section(n ? n->as_table() : nullptr, name);
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

ExperimentConfig parse_config(std::string_view toml_text, std::string_view source_name) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "malformed config " << source_name << ": " << e.description() << " (line " << e.source().begin.line << ")";
    fail(msg.str());
  }

  const std::set<std::string> tables{"geometry", "channel", "grid", "training", "estimators", "zalms", "run"};
  for (const auto& [key, node] : root) {
    if (!tables.contains(std::string(key.str()))) fail("unknown table '" + std::string(key.str()) + "'");
  }

  ExperimentConfig cfg;

  const Section geo = section(root, "geometry");
  geo.check_keys({"M", "N", "lambda_c", "d", "D"});
  cfg.M = geo.count("M", cfg.M);
  cfg.N = geo.count("N", cfg.N);
  cfg.lambda_c = geo.real("lambda_c", cfg.lambda_c);
  // Spacings follow the wavelength and N unless given; with none of the
  // three keys present the built-in values are kept as they are.
  if (geo.has("N") || geo.has("d") || geo.has("lambda_c")) {
    cfg.d = geo.real("d", cfg.lambda_c / 2.0);
    cfg.D = geo.real("D", static_cast<double>(cfg.N) * cfg.d + 8.0 * cfg.lambda_c);
  } else {
    cfg.D = geo.real("D", cfg.D);
  }

  const Section ch = section(root, "channel");
  ch.check_keys({"L", "r_min", "max_abs_sin_theta", "path_model"});
  cfg.L = ch.count("L", cfg.L);
  cfg.r_min = ch.real("r_min", cfg.r_min);
  cfg.max_abs_sin_theta = ch.real("max_abs_sin_theta", cfg.max_abs_sin_theta);
  const std::string pm = ch.text("path_model", "on-grid");
  if (pm == "on-grid") {
    cfg.path_model = PathModel::OnGrid;
  } else if (pm == "continuous") {
    cfg.path_model = PathModel::Continuous;
  } else {
    fail("'channel.path_model' must be \"on-grid\" or \"continuous\"");
  }

  const Section grid = section(root, "grid");
  grid.check_keys({"mode", "T_theta", "step", "r_min", "r_max", "beta", "T_r", "aperture"});
  const std::string mode = grid.text("mode", "uniform");
  if (mode == "uniform") {
    cfg.grid_kind = GridKind::Uniform;
  } else if (mode == "beta") {
    cfg.grid_kind = GridKind::Beta;
  } else {
    fail("'grid.mode' must be \"uniform\" or \"beta\"");
  }
  cfg.num_angles = grid.count("T_theta", cfg.num_angles);
  cfg.grid_step = grid.real("step", cfg.grid_step);
  cfg.grid_r_min = grid.real("r_min", cfg.grid_r_min);
  cfg.grid_r_max = grid.real("r_max", cfg.grid_r_max);
  cfg.beta = grid.real("beta", cfg.beta);
  cfg.beta_rings = grid.count("T_r", cfg.beta_rings);
  const std::string ap = grid.text("aperture", "total");
  if (ap == "total") {
    cfg.beta_aperture = ApertureChoice::TotalAperture;
  } else if (ap == "subarray-spacing") {
    cfg.beta_aperture = ApertureChoice::SubarraySpacing;
  } else {
    fail("'grid.aperture' must be \"total\" or \"subarray-spacing\"");
  }

  const Section tr = section(root, "training");
  tr.check_keys({"Q", "Q_sweep", "snr_db", "pilot_sweep_snr_db"});
  cfg.Q = tr.count("Q", cfg.Q);
  cfg.pilot_lengths = tr.counts("Q_sweep", cfg.pilot_lengths);
  cfg.snr_db = tr.reals("snr_db", cfg.snr_db);
  cfg.pilot_sweep_snr_db = tr.real("pilot_sweep_snr_db", cfg.pilot_sweep_snr_db);

  const Section est = section(root, "estimators");
  est.check_keys({"algorithms", "K"});
  if (est.has("algorithms")) {
    cfg.algorithms.clear();
    for (const auto& name : est.texts("algorithms", {})) cfg.algorithms.push_back(parse_algorithm(name));
  }
  cfg.K = est.count("K", cfg.K);

  const Section z = section(root, "zalms");
  z.check_keys({"mu", "delta", "alpha", "units", "max_iters", "rel_tolerance"});
  cfg.zalms.step_size = z.real("mu", cfg.zalms.step_size);
  cfg.zalms.attractor_step = z.real("delta", cfg.zalms.attractor_step);
  cfg.zalms.sharpness = z.real("alpha", cfg.zalms.sharpness);
  cfg.zalms.max_iters = z.count("max_iters", cfg.zalms.max_iters);
  cfg.zalms.rel_tolerance = z.real("rel_tolerance", cfg.zalms.rel_tolerance);
  const std::string units = z.text("units", "unnormalized-atoms");
  if (units == "unnormalized-atoms") {
    cfg.zalms_units = ZalmsUnits::UnnormalizedAtoms;
  } else if (units == "unit-atoms") {
    cfg.zalms_units = ZalmsUnits::UnitAtoms;
  } else {
    fail("'zalms.units' must be \"unnormalized-atoms\" or \"unit-atoms\"");
  }

  const Section run = section(root, "run");
  run.check_keys({"trials", "base_seed"});
  cfg.trials = run.count("trials", cfg.trials);
  cfg.base_seed = run.count("base_seed", static_cast<std::size_t>(cfg.base_seed));

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string to_toml(const ExperimentConfig& cfg) {
  auto join = [](const auto& values, auto&& render) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ", ";
      s += render(values[i]);
    }
    return s + "]";
  };
  std::ostringstream os;
  os << "[geometry]\n"
     << "M = " << cfg.M << "\nN = " << cfg.N << "\nlambda_c = " << fmt(cfg.lambda_c) << "\nd = " << fmt(cfg.d)
     << "\nD = " << fmt(cfg.D) << "\n\n";
  os << "[channel]\n"
     << "L = " << cfg.L << "\nr_min = " << fmt(cfg.r_min) << "\nmax_abs_sin_theta = " << fmt(cfg.max_abs_sin_theta)
     << "\npath_model = \"" << (cfg.path_model == PathModel::OnGrid ? "on-grid" : "continuous") << "\"\n\n";
  os << "[grid]\n"
     << "mode = \"" << (cfg.grid_kind == GridKind::Uniform ? "uniform" : "beta") << "\"\nT_theta = " << cfg.num_angles
     << "\nstep = " << fmt(cfg.grid_step) << "\nr_min = " << fmt(cfg.grid_r_min) << "\nr_max = " << fmt(cfg.grid_r_max)
     << "\nbeta = " << fmt(cfg.beta) << "\nT_r = " << cfg.beta_rings << "\naperture = \""
     << (cfg.beta_aperture == ApertureChoice::TotalAperture ? "total" : "subarray-spacing") << "\"\n\n";
  os << "[training]\n"
     << "Q = " << cfg.Q << "\nQ_sweep = " << join(cfg.pilot_lengths, [](std::size_t q) { return std::to_string(q); })
     << "\nsnr_db = " << join(cfg.snr_db, [](double v) { return fmt(v); })
     << "\npilot_sweep_snr_db = " << fmt(cfg.pilot_sweep_snr_db) << "\n\n";
  os << "[estimators]\n"
     << "algorithms = "
     << join(cfg.algorithms, [](Algorithm a) { return "\"" + std::string(algorithm_name(a)) + "\""; })
     << "\nK = " << cfg.K << "\n\n";
  os << "[zalms]\n"
     << "mu = " << fmt(cfg.zalms.step_size) << "\ndelta = " << fmt(cfg.zalms.attractor_step)
     << "\nalpha = " << fmt(cfg.zalms.sharpness) << "\nunits = \""
     << (cfg.zalms_units == ZalmsUnits::UnnormalizedAtoms ? "unnormalized-atoms" : "unit-atoms")
     << "\"\nmax_iters = " << cfg.zalms.max_iters << "\nrel_tolerance = " << fmt(cfg.zalms.rel_tolerance) << "\n\n";
  os << "[run]\n"
     << "trials = " << cfg.trials << "\nbase_seed = " << cfg.base_seed << "\n";
  return os.str();
}

}  // namespace nfse
