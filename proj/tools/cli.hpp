#pragma once

#include <iosfwd>

namespace conelab::cli {

enum ExitCode { Success = 0, CheckFailed = 1, UsageError = 2, NumericalError = 3 };

// Parses argv (argv[0] is the program name, argv[1] the subcommand), runs the
// pipeline and writes one JSON document (or CSV with --csv) to out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conelab::cli
