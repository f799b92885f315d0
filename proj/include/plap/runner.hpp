#pragma once

#include <ostream>

#include "plap/error.hpp"
#include "plap/run_config.hpp"

namespace plap {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNonconvergence = 3, kExitVerification = 4 };

int exit_code_for(ErrorKind kind);

/// Executes one command, writing artifacts under cfg.out_dir and a short
/// summary to `log`. Errors become a failure.json plus a nonzero code.
int run(const RunConfig& cfg, std::ostream& log);

/// Writes failure.json into `dir` (best effort).
void write_failure(const std::string& dir, const std::string& kind, const std::string& message, int code);

}  // namespace plap
