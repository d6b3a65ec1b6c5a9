#pragma once

#include "nfse/harness.hpp"

#include <ostream>
#include <string>
#include <string_view>

namespace nfse {

inline constexpr std::string_view kCsvHeader =
    "sweep_param,sweep_value,algorithm,nmse_linear,nmse_db,trials,stderr_db,failed_trials";

/// "snr_db" or "pilot_length".
std::string_view sweep_param_name(SweepKind kind);

/// Header line plus one row per SweepRow, floats with 9 significant digits.
void write_csv(std::ostream& out, const SweepResult& result);
std::string to_csv(const SweepResult& result);

}  // namespace nfse
