#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace infoqm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNoConvergence = 3;

const char* version();

/// Runs the command line `args` (without the program name). Reports go to
/// the --out file when given, otherwise to `out`; diagnostics go to `err`.
/// Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infoqm
