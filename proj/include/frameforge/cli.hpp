#pragma once

#include <iosfwd>

namespace frameforge::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,      // data or configuration problem, or a failed check
    kInputError = 2,   // an input path cannot be read or an output cannot be written
};

/// Entry point of the `frameforge` tool: prepare, run, tune, eval, synth.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace frameforge::cli
