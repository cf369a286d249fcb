#include "rcifs/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "rcifs/counting.hpp"
#include "rcifs/errors.hpp"
#include "rcifs/fixed_format.hpp"
#include "rcifs/poincare.hpp"
#include "rcifs/rng.hpp"
#include "rcifs/transfer.hpp"

namespace rcifs {

namespace {

// Distributes items across `jobs` threads; each item writes only to its own
// preallocated slot, so the result is independent of scheduling. The first
// exception raised by any worker is rethrown after all threads join.
template <class Fn>
void parallel_for(int jobs, std::size_t count, const Fn& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::vector<double> linear_grid(double t_min, double t_max, double t_step) {
    if (!(t_step > 0.0)) fail("type_mismatch", "scenario.params.t_step: must be positive");
    if (!(t_max >= t_min)) fail("type_mismatch", "scenario.params.t_max: must be >= t_min");
    std::vector<double> grid;
    const int points = static_cast<int>(std::floor((t_max - t_min) / t_step + 1e-9)) + 1;
    grid.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) grid.push_back(t_min + static_cast<double>(i) * t_step);
    return grid;
}

std::vector<double> spread_grid(double t_min, double t_max, int points) {
    if (points < 2) fail("type_mismatch", "scenario.params.grid_points: must be >= 2");
    if (!(t_max > t_min)) fail("type_mismatch", "scenario.params.t_max: must be > t_min");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid.push_back(t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    return grid;
}

const EnvironmentConfig& require_env(const ExperimentConfig& config) {
    if (!config.environment) {
        fail("missing_key", "environment: required by scenario " + config.scenario);
    }
    return *config.environment;
}

const EnvironmentMode& require_mode(const ExperimentConfig& config) {
    if (!config.mode) {
        fail("missing_key", "environment.mode: required by scenario " + config.scenario);
    }
    return *config.mode;
}

EnvironmentPath build_path(const Environment& env, const EnvironmentMode& mode, std::size_t length) {
    if (mode.kind == "iid") return sample_iid(env, mode.seed, length);
    if (mode.kind == "eventually_periodic") {
        return make_eventually_periodic(env, mode.prefix, mode.cycle, length);
    }
    if (mode.kind == "balanced") return make_balanced(env, mode.frequencies, length);
    fail("internal_error", "unhandled environment mode " + mode.kind);
}

double min_letter_weight(const System& sys) {
    double w = 1e300;
    for (int e = 0; e < sys.letters(); ++e) w = std::min(w, sys.letter_weight(e));
    return w;
}

std::string bool_cell(bool b) { return b ? "1" : "0"; }

// Shared JSON preamble: schema version, scenario name, generator tag.
JsonWriter summary_writer(const std::string& scenario) {
    JsonWriter jw;
    jw.key_int("schema_version", 1);
    jw.key_string("scenario", scenario);
    jw.key_string("generator", kGeneratorId);
    return jw;
}

void emit(const std::string& dir, const std::string& filename, const std::string& content,
          ScenarioResult& result) {
    const std::string path = dir + "/" + filename;
    atomic_write_file(path, content);
    result.files.push_back(path);
}

// Realized path table: step index, value index, modulus, cumulative log.
std::string path_csv(const EnvironmentPath& path) {
    CsvWriter csv({"k", "index", "modulus", "cum_log"});
    for (std::size_t k = 0; k < path.length(); ++k) {
        csv.row({std::to_string(k), std::to_string(path.index_at(k)), fmt12(path.modulus_at(k)),
                 fmt12(path.cum_log(k + 1))});
    }
    return csv.str();
}

std::string count_note(std::size_t violations, std::size_t checked) {
    return std::to_string(violations) + " violations over " + std::to_string(checked) + " checks";
}

// ---------------------------------------------------------------- scenarios

void run_pressure_curve(const ExperimentConfig& config, const System& sys, const std::string& dir,
                        int /*jobs*/, ScenarioResult& result) {
    const double x_min = param_double(config.params, "x_min", 0.0);
    const double x_max = param_double(config.params, "x_max", 2.0);
    const int points = param_int(config.params, "points", 101);
    if (points < 2) fail("type_mismatch", "scenario.params.points: must be >= 2");
    if (!(x_max > x_min)) fail("type_mismatch", "scenario.params.x_max: must be > x_min");

    CsvWriter csv({"x", "pressure"});
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double x =
            x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(points - 1);
        const double p = pressure(sys, x);
        values.push_back(p);
        csv.row({fmt12(x), fmt12(p)});
    }
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (!(values[i + 1] <= values[i] + 1e-12)) monotone = false;
    }
    const double d = delta(sys);
    const double residual = pressure(sys, d);
    const bool pass = monotone && std::fabs(residual) <= 1e-9;

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_float("x_min", x_min);
    jw.key_float("x_max", x_max);
    jw.key_int("points", points);
    jw.key_float("delta", d);
    jw.key_float("pressure_at_delta", residual);
    jw.key_bool("monotone_decreasing", monotone);
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = "delta=" + fmt12(d);
}

void run_exponents(const ExperimentConfig& config, const System& sys, const std::string& dir,
                   int /*jobs*/, ScenarioResult& result) {
    const Environment env = validate_environment(require_env(config));

    ExponentReport report;
    report.delta = delta(sys);
    report.delta_lambda_env = delta_lambda(sys, env);
    const FluctuationConstants fc = fluctuation_constants(env, env.probabilities());
    report.c = fc.c;
    report.d = fc.d;
    report.bracket_width = report.delta - report.delta_lambda_env;
    if (config.mode) {
        const EnvironmentMode& mode = *config.mode;
        if (mode.kind == "balanced") {
            report.has_path_exponent = true;
            report.delta_lambda_path =
                delta_bounded_fluctuation(sys, fluctuation_constants(env, mode.frequencies).c);
        } else if (mode.kind == "eventually_periodic") {
            std::vector<double> cycle, prefix;
            for (int i : mode.cycle) cycle.push_back(env.value(i));
            for (int i : mode.prefix) prefix.push_back(env.value(i));
            report.has_path_exponent = true;
            report.delta_lambda_path = delta_periodic(sys, cycle, prefix);
        }
    }

    // For i.i.d. environments the expected pressure is the plain pressure
    // shifted by x * (mean log modulus), so its root must coincide with the
    // constant-drift root at c.
    const double cross_check = delta_bounded_fluctuation(sys, report.c);
    const bool pass = std::fabs(report.delta_lambda_env - cross_check) <= 1e-9 &&
                      report.delta_lambda_env >= 0.0 &&
                      report.delta_lambda_env <= report.delta + 1e-12 && report.c <= 1e-15 &&
                      report.d <= report.c + 1e-12;

    CsvWriter csv({"name", "value"});
    csv.row({"delta", fmt12(report.delta)});
    csv.row({"delta_lambda_env", fmt12(report.delta_lambda_env)});
    csv.row({"delta_lambda_path",
             report.has_path_exponent ? fmt12(report.delta_lambda_path) : std::string("nan")});
    csv.row({"c", fmt12(report.c)});
    csv.row({"d", fmt12(report.d)});
    csv.row({"bracket_width", fmt12(report.bracket_width)});

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_float("delta", report.delta);
    jw.key_float("delta_lambda_env", report.delta_lambda_env);
    if (report.has_path_exponent) {
        jw.key_float("delta_lambda_path", report.delta_lambda_path);
    } else {
        jw.key_raw("delta_lambda_path", "null");
    }
    jw.key_float("c", report.c);
    jw.key_float("d", report.d);
    jw.key_float("bracket_width", report.bracket_width);
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = "delta=" + fmt12(report.delta) + " delta_lambda=" + fmt12(report.delta_lambda_env);
}

// Shared body of the deterministic and random counting series scenarios.
void run_count_series(const ExperimentConfig& config, const System& sys, const std::string& dir,
                      ScenarioResult& result, const Environment* env, const EnvironmentPath* path) {
    const double t_min = param_double(config.params, "t_min", 0.0);
    const double t_max = param_double(config.params, "t_max", 12.0);
    const double t_step = param_double(config.params, "t_step", 0.5);
    const std::string backend = param_string(config.params, "backend", "exact");
    if (backend != "exact" && backend != "log") {
        fail("type_mismatch", "scenario.params.backend: expected \"exact\" or \"log\"");
    }
    const std::vector<double> grid = linear_grid(t_min, t_max, t_step);
    const double exponent = env ? delta_lambda(sys, *env) : delta(sys);

    const CountingSeries series = backend == "exact"
                                      ? counting_series<ExactOps>(sys, path, grid, exponent)
                                      : counting_series<LogOps>(sys, path, grid, exponent);

    bool monotone = true;
    for (std::size_t i = 0; i + 1 < series.log_count.size(); ++i) {
        // -inf entries (zero counts) compare fine; allow rounding slack.
        if (!(series.log_count[i] <= series.log_count[i + 1] + 1e-12)) monotone = false;
    }

    CsvWriter csv({"T", backend == "exact" ? "count_decimal" : "log_count", "log_ratio"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.row({fmt12(grid[i]),
                 backend == "exact" ? series.count_text[i] : fmt12(series.log_count[i]),
                 fmt12(series.log_ratio[i])});
    }

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_string("backend", backend);
    jw.key_float(env ? "delta_lambda" : "delta", exponent);
    jw.key_float("t_min", t_min);
    jw.key_float("t_max", t_max);
    jw.key_float("t_step", t_step);
    jw.key_int("points", static_cast<std::int64_t>(grid.size()));
    jw.key_float("certified_rel_error", series.certified_rel_error);
    if (backend == "exact") {
        jw.key_raw("final_count", series.count_text.back());
    }
    jw.key_float("final_log_count", series.log_count.back());
    jw.key_bool("monotone", monotone);
    if (path != nullptr) {
        jw.key_string("mode", config.mode->kind);
        jw.key_int("path_length", static_cast<std::int64_t>(path->length()));
        if (config.mode->kind == "iid") {
            jw.key_int("seed", static_cast<std::int64_t>(config.mode->seed));
        }
    }
    jw.key_bool("pass", monotone);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    if (path != nullptr) emit(dir, config.scenario + "_path.csv", path_csv(*path), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = monotone;
    result.detail = std::to_string(grid.size()) + " thresholds, final log count " +
                    fmt12(series.log_count.back());
}

void run_count(const ExperimentConfig& config, const System& sys, const std::string& dir,
               int /*jobs*/, ScenarioResult& result) {
    run_count_series(config, sys, dir, result, nullptr, nullptr);
}

void run_random_count(const ExperimentConfig& config, const System& sys, const std::string& dir,
                      int /*jobs*/, ScenarioResult& result) {
    const Environment env = validate_environment(require_env(config));
    const EnvironmentMode& mode = require_mode(config);
    const double t_max = param_double(config.params, "t_max", 12.0);
    // Pessimistic length bound: ignores the (nonnegative) environment
    // contribution to the per-step weight, so it always suffices.
    const std::size_t length =
        static_cast<std::size_t>(rows_needed(t_max, min_letter_weight(sys))) + 1;
    const EnvironmentPath path = build_path(env, mode, length);
    run_count_series(config, sys, dir, result, &env, &path);
}

void run_ratio_scan(const ExperimentConfig& config, const System& sys, const std::string& dir,
                    int /*jobs*/, ScenarioResult& result) {
    const double t_min = param_double(config.params, "t_min", 10.0);
    const double t_max = param_double(config.params, "t_max", 200.0);
    const double t_step = param_double(config.params, "t_step", 0.5);
    const double ratio_lo = param_double(config.params, "ratio_lo", 0.9);
    const double ratio_hi = param_double(config.params, "ratio_hi", 2.1);
    const std::vector<double> grid = linear_grid(t_min, t_max, t_step);
    const double d = delta(sys);

    const CountingSeries series = counting_series<LogOps>(sys, nullptr, grid, d);

    CsvWriter csv({"T", "log_count", "log_ratio"});
    std::size_t violations = 0;
    double ratio_min = 1e300, ratio_max = -1e300;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ratio = std::exp(series.log_ratio[i]);
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
        bool ok = ratio >= ratio_lo && ratio <= ratio_hi;
        if (config.corrupt_hook) ok = !ok; // test hook: deliberately inverted check
        if (!ok) ++violations;
        csv.row({fmt12(grid[i]), fmt12(series.log_count[i]), fmt12(series.log_ratio[i])});
    }
    const bool pass = violations == 0;

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_float("delta", d);
    jw.key_float("t_min", t_min);
    jw.key_float("t_max", t_max);
    jw.key_float("t_step", t_step);
    jw.key_int("points", static_cast<std::int64_t>(grid.size()));
    jw.key_float("ratio_lo", ratio_lo);
    jw.key_float("ratio_hi", ratio_hi);
    jw.key_float("ratio_min", ratio_min);
    jw.key_float("ratio_max", ratio_max);
    jw.key_float("certified_rel_error", series.certified_rel_error);
    jw.key_bool("corrupt_hook", config.corrupt_hook);
    jw.key_int("violations", static_cast<std::int64_t>(violations));
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = "ratio in [" + fmt12(ratio_min) + ", " + fmt12(ratio_max) + "], " +
                    count_note(violations, grid.size());
}

void run_sandwich(const ExperimentConfig& config, const System& sys, const std::string& dir,
                  int jobs, ScenarioResult& result) {
    const int env_count = param_int(config.params, "env_count", 50);
    const int value_count = param_int(config.params, "value_count", 2);
    const double modulus_lo = param_double(config.params, "modulus_lo", 0.15);
    const double modulus_hi = param_double(config.params, "modulus_hi", 0.85);
    const std::uint64_t seed = param_u64(config.params, "seed", 1234);
    const double t_min = param_double(config.params, "t_min", 2.0);
    const double t_max = param_double(config.params, "t_max", 12.0);
    const int grid_points = param_int(config.params, "grid_points", 20);
    if (env_count < 1) fail("type_mismatch", "scenario.params.env_count: must be >= 1");
    if (value_count < 1) fail("type_mismatch", "scenario.params.value_count: must be >= 1");
    if (!(modulus_lo > 0.0 && modulus_hi <= 1.0 && modulus_lo < modulus_hi)) {
        fail("type_mismatch", "scenario.params.modulus_lo/hi: need 0 < lo < hi <= 1");
    }
    const std::vector<double> grid = spread_grid(t_min, t_max, grid_points);

    // Each environment draws its moduli from a disjoint counter block, so
    // environment j is reproducible in isolation.
    const CounterRng rng(seed);
    const std::vector<double> uniform_freq(static_cast<std::size_t>(value_count),
                                           1.0 / static_cast<double>(value_count));
    std::vector<std::vector<double>> moduli(static_cast<std::size_t>(env_count));
    for (int j = 0; j < env_count; ++j) {
        std::vector<double>& values = moduli[static_cast<std::size_t>(j)];
        std::uint64_t k = static_cast<std::uint64_t>(j) * 64;
        while (static_cast<int>(values.size()) < value_count) {
            const double v = modulus_lo + (modulus_hi - modulus_lo) * rng.uniform(k++);
            if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
        }
    }

    const std::size_t path_length =
        static_cast<std::size_t>(rows_needed(t_max, min_letter_weight(sys))) + 1;
    std::vector<SandwichReport> reports(static_cast<std::size_t>(env_count));
    parallel_for(jobs, static_cast<std::size_t>(env_count), [&](std::size_t j) {
        EnvironmentConfig raw;
        raw.values = moduli[j];
        raw.probabilities = uniform_freq;
        const Environment env = validate_environment(raw);
        const EnvironmentPath path = make_balanced(env, uniform_freq, path_length);
        reports[j] = sandwich_check(sys, path, grid);
    });

    CsvWriter csv({"env", "T", "lower", "mid", "upper", "ok"});
    std::size_t violations = 0, checked = 0;
    for (int j = 0; j < env_count; ++j) {
        const SandwichReport& report = reports[static_cast<std::size_t>(j)];
        violations += report.violations;
        checked += report.rows.size();
        for (const SandwichReport::Row& row : report.rows) {
            csv.row({std::to_string(j), fmt12(row.t), decimal(row.lower), decimal(row.mid),
                     decimal(row.upper), bool_cell(row.ok)});
        }
    }
    const bool pass = violations == 0;

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_int("env_count", env_count);
    jw.key_int("value_count", value_count);
    jw.key_float("modulus_lo", modulus_lo);
    jw.key_float("modulus_hi", modulus_hi);
    jw.key_int("seed", static_cast<std::int64_t>(seed));
    jw.key_float("t_min", t_min);
    jw.key_float("t_max", t_max);
    jw.key_int("grid_points", grid_points);
    jw.open_array("environments");
    for (const std::vector<double>& values : moduli) {
        std::string tok = "[";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) tok += ", ";
            tok += fmt12(values[i]);
        }
        tok += "]";
        jw.element_raw(tok);
    }
    jw.close_array();
    jw.key_int("checked", static_cast<std::int64_t>(checked));
    jw.key_int("violations", static_cast<std::int64_t>(violations));
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = count_note(violations, checked);
}

void run_reduction(const ExperimentConfig& config, const System& sys, const std::string& dir,
                   int jobs, ScenarioResult& result) {
    const Environment env = validate_environment(require_env(config));
    std::vector<long> seeds = param_long_list(config.params, "seeds", {});
    if (seeds.empty()) {
        for (long s = 1; s <= 10; ++s) seeds.push_back(s);
    }
    const int n_max = param_int(config.params, "n_max", 200);
    if (n_max < 1) fail("type_mismatch", "scenario.params.n_max: must be >= 1");
    if (!sys.equal_ratios()) {
        fail("ratios_not_equal", "the reduction identity requires equal contraction ratios");
    }

    std::vector<int> n_list;
    for (int n = 1; n <= n_max; ++n) n_list.push_back(n);
    const double w = sys.letter_weight(0);
    double min_neg_log = 1e300;
    for (int i = 0; i < env.value_count(); ++i) min_neg_log = std::min(min_neg_log, -env.log_value(i));

    std::vector<ReductionReport> reports(seeds.size());
    parallel_for(jobs, seeds.size(), [&](std::size_t j) {
        const std::uint64_t seed = static_cast<std::uint64_t>(seeds[j]);
        // Two-pass sizing: realize the first n_max steps, find the deepest
        // length any anchored threshold reaches, then extend the same stream
        // (counter-based draws make the longer path a strict extension).
        EnvironmentPath path = sample_iid(env, seed, static_cast<std::size_t>(n_max));
        double t_deepest = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            t_deepest = std::max(t_deepest, static_cast<double>(n) * w -
                                                path.cum_log(static_cast<std::size_t>(n)));
        }
        const std::size_t needed =
            static_cast<std::size_t>(rows_needed(t_deepest, w + min_neg_log)) + 1;
        if (needed > path.length()) path = sample_iid(env, seed, needed);
        reports[j] = reduction_identity_check(sys, path, n_list);
    });

    CsvWriter csv({"seed", "checked", "violations"});
    std::size_t checked = 0, violations = 0;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
        checked += reports[j].checked;
        violations += reports[j].violations;
        csv.row({std::to_string(seeds[j]), std::to_string(reports[j].checked),
                 std::to_string(reports[j].violations)});
    }
    const bool pass = violations == 0;

    JsonWriter jw = summary_writer(config.scenario);
    jw.open_array("seeds");
    for (long s : seeds) jw.element_raw(std::to_string(s));
    jw.close_array();
    jw.key_int("n_max", n_max);
    jw.key_int("checked", static_cast<std::int64_t>(checked));
    jw.key_int("violations", static_cast<std::int64_t>(violations));
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = count_note(violations, checked);
}

void run_crossing_bracket(const ExperimentConfig& config, const System& sys, const std::string& dir,
                          int jobs, ScenarioResult& result) {
    const Environment env = validate_environment(require_env(config));
    const std::uint64_t seed_start = param_u64(config.params, "seed_start", 1);
    const int seed_count = param_int(config.params, "seed_count", 100);
    const int n = param_int(config.params, "n", 10000);
    const long m_min = param_long_list(config.params, "m_range", {-3, 3}).front();
    const long m_max = param_long_list(config.params, "m_range", {-3, 3}).back();
    const double p = param_double(config.params, "p", env.probability(0));
    if (seed_count < 1) fail("type_mismatch", "scenario.params.seed_count: must be >= 1");
    if (n < 2) fail("type_mismatch", "scenario.params.n: must be >= 2");
    if (m_max < m_min) fail("type_mismatch", "scenario.params.m_range: must ascend");

    struct SeedRow {
        long m;
        std::size_t crossings;
        std::size_t violations;
    };
    std::vector<std::vector<SeedRow>> rows(static_cast<std::size_t>(seed_count));
    parallel_for(jobs, static_cast<std::size_t>(seed_count), [&](std::size_t j) {
        const std::uint64_t seed = seed_start + static_cast<std::uint64_t>(j);
        const EnvironmentPath path = sample_iid(env, seed, static_cast<std::size_t>(n));
        for (long m = m_min; m <= m_max; ++m) {
            const std::vector<std::size_t> times = crossing_times(path, 0, p, m);
            const CrossingBracketReport report = crossing_bracket_check(sys, path, p, m, times);
            rows[j].push_back(SeedRow{m, report.checked, report.violations});
        }
    });

    CsvWriter csv({"seed", "m", "crossings", "violations"});
    std::size_t checked = 0, violations = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        for (const SeedRow& row : rows[j]) {
            checked += row.crossings;
            violations += row.violations;
            csv.row({std::to_string(seed_start + j), std::to_string(row.m),
                     std::to_string(row.crossings), std::to_string(row.violations)});
        }
    }
    const bool pass = violations == 0;

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_int("seed_start", static_cast<std::int64_t>(seed_start));
    jw.key_int("seed_count", seed_count);
    jw.key_int("n", n);
    jw.key_float("p", p);
    jw.key_int("m_min", m_min);
    jw.key_int("m_max", m_max);
    jw.key_int("checked", static_cast<std::int64_t>(checked));
    jw.key_int("violations", static_cast<std::int64_t>(violations));
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = count_note(violations, checked);
}

void run_fluctuation_demo(const ExperimentConfig& config, const System& sys, const std::string& dir,
                          int /*jobs*/, ScenarioResult& result) {
    const Environment env = validate_environment(require_env(config));
    const std::vector<long> m_targets = param_long_list(config.params, "m_targets", {-60, 60});
    const int n_cap = param_int(config.params, "n_cap", 400);
    const double calib_lo = param_double(config.params, "calib_lo", 20.0);
    const double calib_hi = param_double(config.params, "calib_hi", 120.0);
    const double min_log_spread =
        param_double(config.params, "min_log_spread", std::log(100.0));

    const FluctuationReport report =
        fluctuation_demo(sys, env, m_targets, n_cap, calib_lo, calib_hi);
    const bool spread_ok = report.rows.size() < 2 || report.log_spread >= min_log_spread;
    const bool pass = report.violations == 0 && spread_ok;

    CsvWriter csv({"m", "n", "T", "log_count", "log_ratio", "lo", "hi", "ok"});
    for (const FluctuationReport::Row& row : report.rows) {
        csv.row({std::to_string(row.m), std::to_string(row.n), fmt12(row.t), fmt12(row.log_count),
                 fmt12(row.log_ratio), fmt12(row.lo), fmt12(row.hi), bool_cell(row.ok)});
    }

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_float("delta", report.delta);
    jw.key_float("delta_lambda", report.delta_lambda);
    jw.key_int("n_cap", n_cap);
    jw.key_float("calib_lo", calib_lo);
    jw.key_float("calib_hi", calib_hi);
    jw.key_float("log_c_meas", report.log_c_meas);
    jw.key_float("log_d_meas", report.log_d_meas);
    jw.key_float("certified_rel_error", report.certified_rel_error);
    jw.key_float("log_spread", report.log_spread);
    jw.key_float("min_log_spread", min_log_spread);
    jw.key_int("violations", static_cast<std::int64_t>(report.violations));
    jw.key_bool("spread_ok", spread_ok);
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = "log spread " + fmt12(report.log_spread) + ", " +
                    count_note(report.violations, report.rows.size());
}

void run_lil(const ExperimentConfig& config, const System& /*sys*/, const std::string& dir,
             int jobs, ScenarioResult& result) {
    const Environment env = validate_environment(require_env(config));
    const std::uint64_t seed_start = param_u64(config.params, "seed_start", 19001);
    const int seed_count = param_int(config.params, "seed_count", 100);
    const int n = param_int(config.params, "n", 1000000);
    const int crossings_n = param_int(config.params, "crossings_n", 100000);
    const double p = param_double(config.params, "p", env.probability(0));
    const int crossings_min = param_int(config.params, "crossings_min", 50);
    const double lil_lo = param_double(config.params, "lil_lo", 0.35);
    const double lil_hi = param_double(config.params, "lil_hi", 1.8);
    const int k_lo = param_int(config.params, "k_lo", 1000);
    const int pass_min = param_int(config.params, "pass_min", 90);
    if (seed_count < 1) fail("type_mismatch", "scenario.params.seed_count: must be >= 1");
    if (n < 32 || crossings_n > n) {
        fail("type_mismatch", "scenario.params.n: need n >= 32 and crossings_n <= n");
    }

    struct SeedStats {
        std::size_t crossings = 0;
        double lil_max = 0.0;
        bool crossings_ok = false;
        bool lil_ok = false;
    };
    std::vector<SeedStats> stats(static_cast<std::size_t>(seed_count));
    parallel_for(jobs, static_cast<std::size_t>(seed_count), [&](std::size_t j) {
        const std::uint64_t seed = seed_start + static_cast<std::uint64_t>(j);
        const EnvironmentPath path = sample_iid(env, seed, static_cast<std::size_t>(n));
        const std::vector<std::size_t> times = crossing_times(path, 0, p, 0);
        SeedStats& s = stats[j];
        for (std::size_t k : times) {
            if (k < static_cast<std::size_t>(crossings_n)) ++s.crossings;
        }
        const LilSeries lil = lil_statistics(path, 0, p);
        s.lil_max = lil.max_over(static_cast<std::size_t>(k_lo), path.length());
        s.crossings_ok = s.crossings >= static_cast<std::size_t>(crossings_min);
        s.lil_ok = s.lil_max > lil_lo && s.lil_max < lil_hi;
    });

    CsvWriter csv({"seed", "crossings", "lil_max", "crossings_ok", "lil_ok"});
    int crossings_pass = 0, lil_pass = 0;
    for (std::size_t j = 0; j < stats.size(); ++j) {
        const SeedStats& s = stats[j];
        if (s.crossings_ok) ++crossings_pass;
        if (s.lil_ok) ++lil_pass;
        csv.row({std::to_string(seed_start + j), std::to_string(s.crossings), fmt12(s.lil_max),
                 bool_cell(s.crossings_ok), bool_cell(s.lil_ok)});
    }
    const bool pass = crossings_pass >= pass_min && lil_pass >= pass_min;

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_int("seed_start", static_cast<std::int64_t>(seed_start));
    jw.key_int("seed_count", seed_count);
    jw.key_int("n", n);
    jw.key_int("crossings_n", crossings_n);
    jw.key_float("p", p);
    jw.key_int("k_lo", k_lo);
    jw.key_int("crossings_min", crossings_min);
    jw.key_float("lil_lo", lil_lo);
    jw.key_float("lil_hi", lil_hi);
    jw.key_int("pass_min", pass_min);
    jw.key_int("crossings_pass_count", crossings_pass);
    jw.key_int("lil_pass_count", lil_pass);
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = "crossings " + std::to_string(crossings_pass) + "/" +
                    std::to_string(seed_count) + ", envelope " + std::to_string(lil_pass) + "/" +
                    std::to_string(seed_count);
}

void run_drift(const ExperimentConfig& config, const System& /*sys*/, const std::string& dir,
               int /*jobs*/, ScenarioResult& result) {
    const Environment env = validate_environment(require_env(config));
    const EnvironmentMode& mode = require_mode(config);
    const int n = param_int(config.params, "n", 1000);
    const double tol = param_double(config.params, "tol", 1e-8);
    if (n < 1) fail("type_mismatch", "scenario.params.n: must be >= 1");

    const EnvironmentPath path = build_path(env, mode, static_cast<std::size_t>(n));
    const std::vector<WalkPoint> drift = drift_sum(path, env);
    const double mean = env.mean_log_value();

    CsvWriter csv({"k", "drift"});
    double max_abs_diff = 0.0;
    for (const WalkPoint& point : drift) {
        const double identity =
            path.cum_log(point.k) - static_cast<double>(point.k) * mean;
        max_abs_diff = std::max(max_abs_diff, std::fabs(point.value - identity));
        csv.row({std::to_string(point.k), fmt12(point.value)});
    }
    const bool pass = max_abs_diff <= tol;

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_int("n", n);
    jw.key_string("mode", mode.kind);
    jw.key_float("mean_log_value", mean);
    jw.key_float("max_abs_identity_diff", max_abs_diff);
    jw.key_float("tol", tol);
    jw.key_float("final_drift", drift.empty() ? 0.0 : drift.back().value);
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + "_path.csv", path_csv(path), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = "max identity residual " + fmt12(max_abs_diff);
}

void run_poincare(const ExperimentConfig& config, const System& sys, const std::string& dir,
                  int /*jobs*/, ScenarioResult& result) {
    const Environment env = validate_environment(require_env(config));
    const EnvironmentMode& mode = require_mode(config);
    const double s_x = param_double(config.params, "s_x", 1.0);
    const double s_y = param_double(config.params, "s_y", 2.0);
    const int n_terms = param_int(config.params, "n_terms", 200);
    const int abscissa_n = param_int(config.params, "abscissa_n", 2000);
    const int abscissa_window = param_int(config.params, "abscissa_window", 500);
    const double agree_tol = param_double(config.params, "agree_tol", 1e-8);
    const double abscissa_tol = param_double(config.params, "abscissa_tol", 1e-3);
    if (n_terms < 1) fail("type_mismatch", "scenario.params.n_terms: must be >= 1");

    const std::complex<double> s(s_x, s_y);
    const std::size_t length = static_cast<std::size_t>(std::max(n_terms, abscissa_n)) + 1;
    const EnvironmentPath path = build_path(env, mode, length);

    const SeriesEvaluation se = eta_partial(sys, path, s, static_cast<std::size_t>(n_terms));
    const double abscissa = abscissa_estimate(sys, path, static_cast<std::size_t>(abscissa_n),
                                              static_cast<std::size_t>(abscissa_window));
    const std::complex<double> partial = se.partial_sums.back();

    bool pass = se.cauchy;
    double agreement = -1.0;
    std::complex<double> closed(0.0, 0.0);
    double reference_exponent = delta_lambda(sys, env);
    if (mode.kind == "eventually_periodic") {
        std::vector<double> cycle, prefix;
        for (int i : mode.cycle) cycle.push_back(env.value(i));
        for (int i : mode.prefix) prefix.push_back(env.value(i));
        closed = eta_closed_periodic(sys, prefix, cycle, s);
        agreement = std::abs(closed - partial);
        reference_exponent = delta_periodic(sys, cycle, prefix);
        pass = pass && agreement <= agree_tol &&
               std::fabs(abscissa - reference_exponent) <= abscissa_tol;
    }

    CsvWriter csv({"n", "term_magnitude", "partial_real", "partial_imag"});
    for (std::size_t i = 0; i < se.partial_sums.size(); ++i) {
        csv.row({std::to_string(i + 1), fmt12(se.term_magnitudes[i]),
                 fmt12(se.partial_sums[i].real()), fmt12(se.partial_sums[i].imag())});
    }

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_float("s_x", s_x);
    jw.key_float("s_y", s_y);
    jw.key_int("n_terms", n_terms);
    jw.key_string("mode", mode.kind);
    jw.key_float("eta_partial_real", partial.real());
    jw.key_float("eta_partial_imag", partial.imag());
    jw.key_bool("cauchy", se.cauchy);
    jw.key_float("tail_bound", se.tail_bound);
    if (mode.kind == "eventually_periodic") {
        jw.key_float("eta_closed_real", closed.real());
        jw.key_float("eta_closed_imag", closed.imag());
        jw.key_float("agreement_abs", agreement);
        jw.key_float("agree_tol", agree_tol);
    }
    jw.key_float("abscissa", abscissa);
    jw.key_int("abscissa_n", abscissa_n);
    jw.key_int("abscissa_window", abscissa_window);
    jw.key_float("reference_exponent", reference_exponent);
    jw.key_float("abscissa_tol", abscissa_tol);
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + "_path.csv", path_csv(path), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = "abscissa " + fmt12(abscissa) +
                    (agreement >= 0.0 ? ", closed-vs-partial " + fmt12(agreement) : std::string());
}

void run_theta_scan(const ExperimentConfig& config, const System& /*sys*/, const std::string& dir,
                    int /*jobs*/, ScenarioResult& result) {
    ThetaParams params;
    params.ratios = param_double_list(config.params, "ratios", params.ratios);
    params.cycle = param_double_list(config.params, "cycle", {0.2});
    params.m = param_int(config.params, "m", static_cast<int>(params.cycle.size()));
    const double y_max = param_double(config.params, "y_max", 20.0);
    const double grid_step = param_double(config.params, "grid_step", 0.005);
    const double offaxis_floor = param_double(config.params, "offaxis_floor", 1e-3);
    const int expected_zeros = param_int(config.params, "expected_zeros", 1);

    const ZeroScanResult scan = zero_scan(params, y_max, grid_step);

    bool all_simple = true;
    for (const ThetaZero& zero : scan.zeros) all_simple = all_simple && zero.simple;
    const bool count_ok =
        expected_zeros < 0 || static_cast<int>(scan.zeros.size()) == expected_zeros;
    const bool offaxis_ok = scan.min_offaxis_abs < 0.0 || scan.min_offaxis_abs > offaxis_floor;
    const bool pass = all_simple && count_ok && offaxis_ok;

    CsvWriter csv({"y", "abs_theta"});
    for (std::size_t i = 0; i < scan.grid_y.size(); ++i) {
        csv.row({fmt12(scan.grid_y[i]), fmt12(scan.grid_abs[i])});
    }

    JsonWriter jw = summary_writer(config.scenario);
    jw.key_int("m", params.m);
    jw.open_array("ratios");
    for (double r : params.ratios) jw.element_float(r);
    jw.close_array();
    jw.open_array("cycle");
    for (double z : params.cycle) jw.element_float(z);
    jw.close_array();
    jw.key_float("y_max", y_max);
    jw.key_float("grid_step", grid_step);
    jw.key_float("x0", scan.x0);
    jw.key_int("zero_count", static_cast<std::int64_t>(scan.zeros.size()));
    jw.open_array("zeros");
    for (const ThetaZero& zero : scan.zeros) {
        jw.open_object_element();
        jw.key_float("x", zero.x);
        jw.key_float("y", zero.y);
        jw.key_float("abs_theta", zero.abs_theta);
        jw.key_float("abs_theta_prime", zero.abs_theta_prime);
        jw.key_bool("simple_flag", zero.simple);
        jw.close_object();
    }
    jw.close_array();
    jw.key_float("min_offaxis_abs", scan.min_offaxis_abs);
    jw.key_float("offaxis_floor", offaxis_floor);
    jw.key_bool("pass", pass);

    emit(dir, config.scenario + ".csv", csv.str(), result);
    emit(dir, config.scenario + ".json", jw.str(), result);
    result.pass = pass;
    result.detail = std::to_string(scan.zeros.size()) + " zeros, x0=" + fmt12(scan.x0);
}

} // namespace

std::string resolve_output_dir(const ExperimentConfig& config, const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    const char* env_dir = std::getenv("RCIFS_OUT_DIR");
    if (env_dir != nullptr && env_dir[0] != '\0') return env_dir;
    return config.output_dir;
}

ScenarioResult run_experiment(const ExperimentConfig& config, const std::string& out_dir_override,
                              int jobs) {
    ScenarioResult result;
    result.scenario = config.scenario;
    const std::string dir = resolve_output_dir(config, out_dir_override);
    const System sys = validate_system(config.system);

    using Runner = void (*)(const ExperimentConfig&, const System&, const std::string&, int,
                            ScenarioResult&);
    struct Entry {
        const char* name;
        Runner runner;
    };
    static const Entry kTable[] = {
        {"pressure-curve", run_pressure_curve},
        {"exponents", run_exponents},
        {"count", run_count},
        {"random-count", run_random_count},
        {"ratio-scan", run_ratio_scan},
        {"sandwich", run_sandwich},
        {"reduction", run_reduction},
        {"crossing-bracket", run_crossing_bracket},
        {"fluctuation-demo", run_fluctuation_demo},
        {"lil", run_lil},
        {"drift", run_drift},
        {"poincare", run_poincare},
        {"theta-scan", run_theta_scan},
    };
    for (const Entry& entry : kTable) {
        if (config.scenario == entry.name) {
            entry.runner(config, sys, dir, jobs, result);
            return result;
        }
    }
    fail("unknown_scenario", "scenario.name: " + config.scenario); // parse_config guards this
}

} // namespace rcifs
