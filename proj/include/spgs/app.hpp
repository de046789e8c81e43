#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spgs/config.hpp"
#include "spgs/error.hpp"

namespace spgs {

struct Artifact {
    std::string name;
    std::string content;
};

struct RunRequest {
    std::string subcommand;  // solve-limit, solve, sweep-lambda, constants, poisson-test, verify
    std::optional<double> lambda;
    std::vector<double> q_list{2.5, 3.0, 4.0, 5.0};
    bool grid_study = false;
};

struct RunOutcome {
    int exit_code = 0;
    std::string summary_json;
    std::vector<Artifact> artifacts;
};

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_solver = 3, exit_verification = 4, exit_internal = 5 };

int exit_code_for(ErrorCode code) noexcept;

/// Runs one subcommand. Never throws: failures come back as a nonzero exit code
/// with a summary of the form {"status": "error", "failures": [...]}.
RunOutcome run(const RunConfig& cfg, const RunRequest& req);

const std::vector<std::string>& subcommands();

/// The exact CSV header of sweep-lambda and solve.
extern const char* const kBranchCsvHeader;

} // namespace spgs
