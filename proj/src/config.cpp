#include "rcifs/config.hpp"

#include <algorithm>

#include "rcifs/errors.hpp"

namespace rcifs {

namespace {

using nlohmann::json;

[[noreturn]] void missing(const std::string& path) {
    fail("missing_key", path + ": required key is absent");
}

[[noreturn]] void wrong_type(const std::string& path, const char* expected) {
    fail("type_mismatch", path + ": expected " + expected);
}

const json& require(const json& node, const std::string& path, const char* key) {
    const auto it = node.find(key);
    if (it == node.end()) missing(path + "." + key);
    return *it;
}

double as_double(const json& node, const std::string& path) {
    if (!node.is_number()) wrong_type(path, "a number");
    return node.get<double>();
}

int as_int(const json& node, const std::string& path) {
    if (!node.is_number_integer()) wrong_type(path, "an integer");
    return node.get<int>();
}

std::string as_string(const json& node, const std::string& path) {
    if (!node.is_string()) wrong_type(path, "a string");
    return node.get<std::string>();
}

std::vector<double> as_double_list(const json& node, const std::string& path) {
    if (!node.is_array()) wrong_type(path, "an array of numbers");
    std::vector<double> out;
    out.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(as_double(node[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<int> as_int_list(const json& node, const std::string& path) {
    if (!node.is_array()) wrong_type(path, "an array of integers");
    std::vector<int> out;
    out.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(as_int(node[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

SystemConfig parse_system(const json& node) {
    if (!node.is_object()) wrong_type("system", "an object");
    SystemConfig sys;
    sys.ratios = as_double_list(require(node, "system", "ratios"), "system.ratios");
    const json& inc = require(node, "system", "incidence");
    if (!inc.is_array()) wrong_type("system.incidence", "an array of 0/1 rows");
    for (std::size_t r = 0; r < inc.size(); ++r) {
        sys.incidence.push_back(as_int_list(inc[r], "system.incidence[" + std::to_string(r) + "]"));
    }
    if (node.contains("suffix_letter")) {
        sys.suffix_letter = as_int(node["suffix_letter"], "system.suffix_letter");
    }
    if (node.contains("placements")) {
        sys.placements = as_double_list(node["placements"], "system.placements");
    }
    if (node.contains("dgeneric")) {
        const std::string flag = as_string(node["dgeneric"], "system.dgeneric");
        if (flag == "none") {
            sys.dgeneric = DGenericFlag::none;
        } else if (flag == "d_generic") {
            sys.dgeneric = DGenericFlag::d_generic;
        } else if (flag == "strongly_d_generic") {
            sys.dgeneric = DGenericFlag::strongly_d_generic;
        } else {
            wrong_type("system.dgeneric", "one of none|d_generic|strongly_d_generic");
        }
    }
    return sys;
}

EnvironmentConfig parse_environment(const json& node) {
    if (!node.is_object()) wrong_type("environment", "an object");
    EnvironmentConfig env;
    env.values = as_double_list(require(node, "environment", "values"), "environment.values");
    env.probabilities =
        as_double_list(require(node, "environment", "probabilities"), "environment.probabilities");
    if (node.contains("epsilon")) {
        env.epsilon = as_double(node["epsilon"], "environment.epsilon");
    }
    double sum = 0.0;
    for (double p : env.probabilities) sum += p;
    if (std::fabs(sum - 1.0) > 1e-12) {
        fail("type_mismatch", "environment.probabilities: must sum to 1, got " + std::to_string(sum));
    }
    return env;
}

EnvironmentMode parse_mode(const json& node) {
    if (!node.is_object()) wrong_type("environment.mode", "an object");
    EnvironmentMode mode;
    mode.kind = as_string(require(node, "environment.mode", "kind"), "environment.mode.kind");
    if (mode.kind == "iid") {
        const json& seed = require(node, "environment.mode", "seed");
        if (!seed.is_number_integer()) wrong_type("environment.mode.seed", "an integer");
        mode.seed = seed.get<std::uint64_t>();
    } else if (mode.kind == "eventually_periodic") {
        if (node.contains("prefix")) {
            mode.prefix = as_int_list(node["prefix"], "environment.mode.prefix");
        }
        mode.cycle = as_int_list(require(node, "environment.mode", "cycle"), "environment.mode.cycle");
    } else if (mode.kind == "balanced") {
        mode.frequencies = as_double_list(require(node, "environment.mode", "frequencies"),
                                          "environment.mode.frequencies");
    } else {
        wrong_type("environment.mode.kind", "one of iid|eventually_periodic|balanced");
    }
    return mode;
}

} // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "pressure-curve", "exponents",        "count",  "random-count", "ratio-scan",
        "sandwich",       "reduction",        "crossing-bracket",       "fluctuation-demo",
        "lil",            "drift",            "poincare",               "theta-scan",
    };
    return names;
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        fail("type_mismatch", std::string("configuration is not valid JSON: ") + err.what());
    }
    if (!doc.is_object()) wrong_type("(document)", "a JSON object");

    ExperimentConfig config;
    if (doc.contains("schema_version")) {
        config.schema_version = as_int(doc["schema_version"], "schema_version");
    }

    const json& scenario = require(doc, "(document)", "scenario");
    if (!scenario.is_object()) wrong_type("scenario", "an object");
    config.scenario = as_string(require(scenario, "scenario", "name"), "scenario.name");
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), config.scenario) == names.end()) {
        std::string valid;
        for (const std::string& n : names) {
            if (!valid.empty()) valid += ", ";
            valid += n;
        }
        fail("unknown_scenario", "scenario.name: \"" + config.scenario + "\" is not one of {" + valid + "}");
    }
    config.params = scenario.contains("params") ? scenario["params"] : json::object();
    if (!config.params.is_object()) wrong_type("scenario.params", "an object");

    config.system = parse_system(require(doc, "(document)", "system"));

    if (doc.contains("environment")) {
        const json& env = doc["environment"];
        config.environment = parse_environment(env);
        if (env.contains("mode")) config.mode = parse_mode(env["mode"]);
    }

    if (doc.contains("output")) {
        const json& output = doc["output"];
        if (!output.is_object()) wrong_type("output", "an object");
        if (output.contains("dir")) config.output_dir = as_string(output["dir"], "output.dir");
    }
    if (doc.contains("test_hook_corrupt")) {
        const json& hook = doc["test_hook_corrupt"];
        if (!hook.is_boolean()) wrong_type("test_hook_corrupt", "a boolean");
        config.corrupt_hook = hook.get<bool>();
    }
    return config;
}

double param_double(const nlohmann::json& params, const std::string& key, double fallback) {
    if (!params.contains(key)) return fallback;
    return as_double(params[key], "scenario.params." + key);
}

int param_int(const nlohmann::json& params, const std::string& key, int fallback) {
    if (!params.contains(key)) return fallback;
    return as_int(params[key], "scenario.params." + key);
}

std::uint64_t param_u64(const nlohmann::json& params, const std::string& key, std::uint64_t fallback) {
    if (!params.contains(key)) return fallback;
    const json& node = params[key];
    if (!node.is_number_integer()) wrong_type("scenario.params." + key, "an integer");
    return node.get<std::uint64_t>();
}

bool param_bool(const nlohmann::json& params, const std::string& key, bool fallback) {
    if (!params.contains(key)) return fallback;
    const json& node = params[key];
    if (!node.is_boolean()) wrong_type("scenario.params." + key, "a boolean");
    return node.get<bool>();
}

std::string param_string(const nlohmann::json& params, const std::string& key,
                         const std::string& fallback) {
    if (!params.contains(key)) return fallback;
    return as_string(params[key], "scenario.params." + key);
}

std::vector<long> param_long_list(const nlohmann::json& params, const std::string& key,
                                  const std::vector<long>& fallback) {
    if (!params.contains(key)) return fallback;
    const json& node = params[key];
    if (!node.is_array()) wrong_type("scenario.params." + key, "an array of integers");
    std::vector<long> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const json& item = node[i];
        if (!item.is_number_integer()) {
            wrong_type("scenario.params." + key + "[" + std::to_string(i) + "]", "an integer");
        }
        out.push_back(item.get<long>());
    }
    return out;
}

std::vector<double> param_double_list(const nlohmann::json& params, const std::string& key,
                                      const std::vector<double>& fallback) {
    if (!params.contains(key)) return fallback;
    return as_double_list(params[key], "scenario.params." + key);
}

} // namespace rcifs
