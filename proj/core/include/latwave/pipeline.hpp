#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "latwave/config.hpp"

namespace latwave {

enum class Command { Check, Singular, Solve, Continue, Spectrum, Essential, Simulate, Stability, All };

Command parse_command(const std::string& name);  // throws std::invalid_argument
std::string to_string(Command c);

struct CommandResult {
    int exit_code = 0;
    nlohmann::json summary;  // deterministic; also written to <out>/summary.json
    nlohmann::json timing;   // wall-clock seconds per stage, <out>/timing.json
};

// Runs the stages behind `cmd` and writes artifacts to cfg.out_dir.  Solver
// and scan errors are recorded in the summary rather than thrown.  Exit code
// is 0 iff every check passes.
CommandResult run_command(Command cmd, const RunConfig& cfg);

}  // namespace latwave
