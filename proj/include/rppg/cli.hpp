#pragma once

#include <iosfwd>

#include "rppg/error.hpp"

namespace rppg::cli {

// 0 success, 1 internal error, 2 argument/format error, 3 data/alignment error.
enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2, kData = 3 };

int exit_code_for(ErrorCode code);

// Entry point for `rppg <subcommand> ...`; also driven in-process by tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rppg::cli
