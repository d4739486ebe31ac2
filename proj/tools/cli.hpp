#pragma once

#include <iosfwd>

namespace atomcover::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseFailure = 2,
  kInvalidFlags = 3,
  kDegenerateGeometry = 4,
};

/// Runs one command line. Reports go to `out` unless written to a file;
/// diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace atomcover::cli
