#pragma once

#include <cstdint>
#include <string>

namespace agingmimo {

struct RunnerOptions {
    std::string command;        // correlate | estimate | se-det | se-mc | bounds |
                                // optimize | selftest
    std::string scenario_path;  // required by every command except selftest
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_overridden = false;
    int trials = -1;  // <= 0: use the scenario's evaluation.trials
    int threads = 1;
};

/// Executes one batch command and returns the process exit code:
/// 0 success, 2 scenario/usage error, 3 numerical failure, 4 I/O error.
int run_command(const RunnerOptions& opts);

}  // namespace agingmimo
