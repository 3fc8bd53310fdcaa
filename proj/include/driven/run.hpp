// run.hpp — Run orchestration and CSV emission for the command-line front end

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "driven/config.hpp"
#include "driven/validity.hpp"

namespace driven {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes shared with the CLI: 0 success, 1 config error, 2 solver abort,
// 3 validity fail (check-validity only).
enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_solver = 2, exit_validity = 3 };

// Runs one engine and writes the CSV (header comments carry the resolved config and the
// validity flags). Returns an ExitCode; diagnostics go to `diag`.
int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

int run_check_validity(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

// One full simulate per value written to <prefix>_<key>=<value>.csv plus
// <prefix>_summary.csv; failed runs are recorded in the summary and do not stop the rest.
int run_sweep(const RunConfig& base, const std::string& key, const std::vector<std::string>& values,
              const std::string& prefix, std::ostream& diag);

std::string format_validity(const ValidityReport& report);

}  // namespace driven
