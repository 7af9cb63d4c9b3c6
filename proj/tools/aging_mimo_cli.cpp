#include <CLI11.hpp>

#include "agingmimo/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"aging-mimo: multi-user MIMO uplink analysis over aging channels"};
    app.require_subcommand(1);

    agingmimo::RunnerOptions opts;

    struct SubSpec {
        const char* name;
        const char* help;
        bool needs_scenario;
    };
    const SubSpec specs[] = {
        {"correlate", "Space-time correlation of one user's channel", true},
        {"estimate", "Channel-estimator traces with a Monte-Carlo pilot check", true},
        {"se-det", "Deterministic per-slot spectral efficiency", true},
        {"se-mc", "Deterministic + Monte-Carlo per-slot spectral efficiency", true},
        {"bounds", "Capacity-bound comparison at the evaluation slot", true},
        {"optimize", "Frame / pilot-power search maximizing average rate", true},
        {"selftest", "Fast internal consistency checks", false},
    };

    for (const SubSpec& s : specs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        if (s.needs_scenario)
            sub->add_option("-s,--scenario", opts.scenario_path, "Scenario JSON file")
                ->required();
        sub->add_option("-o,--out", opts.out_dir, "Output directory (default: .)");
        sub->add_option("--seed", opts.seed, "Override the scenario seed");
        sub->add_option("--trials", opts.trials, "Override the scenario trial count");
        sub->add_option("--threads", opts.threads,
                        "Worker threads for Monte-Carlo loops (default 1)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    opts.command = sub->get_name();
    opts.seed_overridden = sub->count("--seed") > 0;
    return agingmimo::run_command(opts);
}
