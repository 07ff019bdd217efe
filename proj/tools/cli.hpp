#pragma once

#include <iosfwd>

namespace bosefit::cli {

/// Exit codes shared by every verb.
enum ExitCode : int {
    kSuccess = 0,
    kNonConvergence = 1,
    kInputError = 2,
};

/// Entry point behind the `bosefit` executable. Reports go to `out` (or the
/// --out file), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bosefit::cli
