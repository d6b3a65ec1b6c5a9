#include "nfse/csv.hpp"

#include <cstdio>
#include <sstream>

namespace nfse {

namespace {

std::string g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string_view sweep_param_name(SweepKind kind) {
  return kind == SweepKind::Snr ? "snr_db" : "pilot_length";
}

void write_csv(std::ostream& out, const SweepResult& result) {
  out << kCsvHeader << '\n';
  const std::string_view param = sweep_param_name(result.kind);
  for (const auto& row : result.rows) {
    out << param << ',' << g9(row.sweep_value) << ',' << algorithm_name(row.algorithm) << ',' << g9(row.nmse_linear)
        << ',' << g9(row.nmse_db) << ',' << row.trials << ',' << g9(row.stderr_db) << ',' << row.failed_trials << '\n';
  }
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream os;
  write_csv(os, result);
  return os.str();
}

}  // namespace nfse
