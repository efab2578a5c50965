#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "pbnssa/model.hpp"
#include "run_record.hpp"

namespace pbnssa::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitMismatch = 1,
  kExitUsage = 2,
  kExitDegenerate = 3,
  kExitNonConvergence = 4,
  kExitIo = 5,
};

/// Worker count from PBNSSA_WORKERS, else the hardware concurrency (at least 1).
unsigned default_workers();

/// Runs record.method on `model` with the record's settings, properties, seed
/// and workers, and fills in the results. Throws NonConvergenceError when the
/// chains of a parallel method do not converge.
RunRecord execute(const PbnModel& model, RunRecord record);

/// Exit code summarising the statuses of a finished record.
int exit_code(const RunRecord& record);

/// Entry point. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pbnssa::cli
