#pragma once

#include <string>
#include <vector>

#include "rachbound/csv.hpp"

namespace rachbound::cli {

struct CompareReport {
  int matched = 0;
  int checked = 0;  // statistically resolvable (or exact) points
  int failures = 0;
  /// Failures against estimated-knowledge simulations: expected, reported only.
  int informational_failures = 0;
  double max_margin = 0.0;  // largest reference - bound over checked points
  std::vector<std::string> lines;
  int exit_code = 0;
};

/// Checks bound >= reference per (N, M, b_eps, t). Simulation references are
/// compared by their upper confidence limit wherever they have >= 10 hits,
/// oracle references by value with 1e-9 slack.
CompareReport compare_tables(const std::vector<ResultRow>& bound,
                             const std::vector<ResultRow>& reference);

}  // namespace rachbound::cli
