#ifndef RCIFS_CONFIG_HPP
#define RCIFS_CONFIG_HPP

// Experiment configuration: a JSON document with `system`, optional
// `environment` (including its path mode), a `scenario` block naming one of
// the built-in scenarios plus its parameters, and an optional `output`
// block. Parsing validates shape and value types eagerly and reports the
// full key path of any offence (missing_key / type_mismatch /
// unknown_scenario).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcifs/environment.hpp"
#include "rcifs/system.hpp"

namespace rcifs {

// How an environment path is realized for scenarios that need one.
struct EnvironmentMode {
    std::string kind; // "iid" | "eventually_periodic" | "balanced"
    std::uint64_t seed = 0;
    std::vector<int> prefix;
    std::vector<int> cycle;
    std::vector<double> frequencies;
};

struct ExperimentConfig {
    int schema_version = 1;
    std::string scenario;
    SystemConfig system;
    std::optional<EnvironmentConfig> environment;
    std::optional<EnvironmentMode> mode;
    nlohmann::json params;        // scenario parameter object (may be empty)
    std::string output_dir = "out";
    bool corrupt_hook = false;    // test-only: injects a deliberately wrong
                                  // comparison so exit-status plumbing is testable
};

// Valid scenario names, in the order they are documented.
const std::vector<std::string>& scenario_names();

ExperimentConfig parse_config(const std::string& text);

// Typed parameter getters used by the scenario runner; `path` is the
// dotted key path reported in diagnostics.
double param_double(const nlohmann::json& params, const std::string& key, double fallback);
int param_int(const nlohmann::json& params, const std::string& key, int fallback);
std::uint64_t param_u64(const nlohmann::json& params, const std::string& key, std::uint64_t fallback);
bool param_bool(const nlohmann::json& params, const std::string& key, bool fallback);
std::string param_string(const nlohmann::json& params, const std::string& key,
                         const std::string& fallback);
std::vector<long> param_long_list(const nlohmann::json& params, const std::string& key,
                                  const std::vector<long>& fallback);
std::vector<double> param_double_list(const nlohmann::json& params, const std::string& key,
                                      const std::vector<double>& fallback);

} // namespace rcifs

#endif
