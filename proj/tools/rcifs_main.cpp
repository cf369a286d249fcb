// Command-line front end: `rcifs run` executes one configured scenario and
// writes its CSV/JSON outputs; `rcifs validate` parses a config (including
// the system and environment blocks) and reports the first problem found.
//
// Exit codes: 0 = all scenario checks passed, 1 = the scenario ran but a
// check failed, 2 = the run could not be completed (bad config, bad
// arguments, I/O failure).

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rcifs/config.hpp"
#include "rcifs/fixed_format.hpp"
#include "rcifs/scenarios.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Exact counting laboratory for random conformal iterated function systems"};
    app.require_subcommand(1);

    std::string run_config, out_dir;
    int jobs = 1;
    CLI::App* run = app.add_subcommand("run", "Run one scenario and write its output files");
    run->add_option("--config", run_config, "Path to the experiment config (JSON)")->required();
    run->add_option("--out", out_dir,
                    "Output directory (overrides RCIFS_OUT_DIR and the config's output.dir)");
    run->add_option("--jobs", jobs, "Worker threads for seed/environment sweeps (default 1)")
        ->check(CLI::PositiveNumber);

    std::string validate_config;
    CLI::App* validate = app.add_subcommand("validate", "Parse and validate a config, then exit");
    validate->add_option("--config", validate_config, "Path to the experiment config (JSON)")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const rcifs::ExperimentConfig config = rcifs::parse_config(rcifs::read_file(run_config));
            const rcifs::ScenarioResult result = rcifs::run_experiment(config, out_dir, jobs);
            for (const std::string& file : result.files) {
                std::cout << "wrote " << file << "\n";
            }
            std::cout << "scenario " << result.scenario << ": "
                      << (result.pass ? "PASS" : "FAIL");
            if (!result.detail.empty()) std::cout << " (" << result.detail << ")";
            std::cout << "\n";
            return result.pass ? 0 : 1;
        }
        const rcifs::ExperimentConfig config =
            rcifs::parse_config(rcifs::read_file(validate_config));
        rcifs::validate_system(config.system);
        if (config.environment) rcifs::validate_environment(*config.environment);
        std::cout << "ok: scenario " << config.scenario << "\n";
        return 0;
    } catch (const rcifs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
