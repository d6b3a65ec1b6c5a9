#pragma once

#include <iosfwd>

namespace nfse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `nfse` tool. Subcommands: sweep-snr, sweep-pilot,
/// estimate, validate-config. Returns 2 for usage and configuration errors,
/// 1 for other runtime failures.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace nfse
