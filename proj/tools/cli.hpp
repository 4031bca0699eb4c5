#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvlsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFinding = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Normal output goes to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvlsim
