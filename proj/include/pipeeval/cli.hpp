#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pipeeval::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 2,
    kExitAnalysisError = 3,
    kExitNotConverged = 4,
};

/// Runs one `pipeeval` invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace pipeeval::cli
