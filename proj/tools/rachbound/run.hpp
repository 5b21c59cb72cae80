#pragma once

#include <string>
#include <vector>

#include "rachbound/config.hpp"
#include "rachbound/csv.hpp"
#include "rachbound/svg.hpp"

namespace rachbound::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitDominanceFailure = 1,
  kExitInvalidInput = 2,
  kExitNotConverged = 3,
  kExitIo = 4,
};

struct RunOutcome {
  std::vector<ResultRow> rows;
  std::vector<std::string> diagnostics;
  int exit_code = kExitOk;
};

/// Validates `spec` (throws InputError) and runs its engine.
RunOutcome run(const RunSpec& spec);

/// eps-vs-t chart (log y) for bound/oracle/simulate rows, N_max-vs-eps
/// (log x) for dimensioning rows, b-vs-eps for backlog-bound rows.
Chart make_chart(const std::vector<ResultRow>& rows);

}  // namespace rachbound::cli
