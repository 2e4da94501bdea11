#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sra::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2, kNumericError = 3 };

/// Environment variable holding the default seed.
inline constexpr const char* kSeedEnv = "SRA_SEED";

/// Runs the command line `args` (without the program name) and returns the
/// exit code. Regular output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sra::cli
