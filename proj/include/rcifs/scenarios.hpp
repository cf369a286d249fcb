#ifndef RCIFS_SCENARIOS_HPP
#define RCIFS_SCENARIOS_HPP

// The experiment driver: maps each named scenario onto the library
// operations it exercises, evaluates the scenario's built-in checks, and
// emits a CSV series plus a JSON summary per run. Output is deterministic:
// identical config (and library version) produces byte-identical files.

#include <string>
#include <vector>

#include "rcifs/config.hpp"

namespace rcifs {

struct ScenarioResult {
    std::string scenario;
    bool pass = false;
    std::vector<std::string> files; // paths written, in emission order
    std::string detail;             // one-line outcome note for the console
};

// Output directory precedence: explicit override (CLI --out), then the
// RCIFS_OUT_DIR environment variable, then the config's output.dir.
std::string resolve_output_dir(const ExperimentConfig& config, const std::string& override_dir);

// Runs the configured scenario and writes its files under the resolved
// output directory. `jobs` >= 2 distributes independent sweep items (seeds,
// environments) across that many threads; results are identical to the
// serial order because every item writes to its own preallocated slot.
// Errors: propagated module errors, plus missing_key when the scenario
// needs an environment or path mode the config does not provide.
ScenarioResult run_experiment(const ExperimentConfig& config,
                              const std::string& out_dir_override = std::string(),
                              int jobs = 1);

} // namespace rcifs

#endif
