#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gprnn::cli {

/// Exit statuses of the command-line tool.
enum ExitStatus : int { kSuccess = 0, kUsageError = 1, kDataError = 2, kNumericalError = 3 };

/// Runs one command line (args[0] is the program name). Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gprnn::cli
