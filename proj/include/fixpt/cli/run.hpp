#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "fixpt/cli/scenario.hpp"

namespace fixpt::cli {

enum ExitCode : int { exit_ok = 0, exit_spec_error = 2, exit_budget = 3 };

struct Artifact {
  std::string name;  // file name inside the output directory
  std::string content;
};

struct RunResult {
  int status = exit_ok;
  /// {scheme, params, witness, violations, seed, status}
  nlohmann::json report;
  /// report.json first, then CSV / JSON-lines outputs.
  std::vector<Artifact> artifacts;
};

/// Runs one scenario in memory. Spec-level failures found while building or
/// running (dimension clashes, inconsistent fire tables, a start point off
/// the domain) give exit_spec_error; exhausted search budgets give
/// exit_budget with whatever was produced so far.
RunResult run_scenario(const ScenarioSpec& spec);

/// Writes every artifact under dir, creating it if needed.
void write_artifacts(const RunResult& result, const std::string& dir);

/// Report for a spec that failed to parse.
RunResult spec_error_result(const std::vector<SpecError>& errors);

}  // namespace fixpt::cli
