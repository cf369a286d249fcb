// End-to-end acceptance run: thirteen numbered checks covering the exponent
// closed forms, the counting engine against brute-force oracles, the
// finite-scale bracket and identity checks, the series evaluators, the
// statistical envelopes, and byte-level determinism of the bundled
// experiment configs. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fail. Usage: acceptance <configs-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rcifs/bigint.hpp"
#include "rcifs/composition_table.hpp"
#include "rcifs/config.hpp"
#include "rcifs/counting.hpp"
#include "rcifs/environment.hpp"
#include "rcifs/errors.hpp"
#include "rcifs/poincare.hpp"
#include "rcifs/rng.hpp"
#include "rcifs/scenarios.hpp"
#include "rcifs/system.hpp"
#include "rcifs/transfer.hpp"

namespace fs = std::filesystem;
using namespace rcifs;

namespace {

int g_failures = 0;

void report(int number, const char* label, bool ok, double seconds, const std::string& note) {
    std::printf("criterion %d: %s — %s (%.1fs)%s%s\n", number, ok ? "PASS" : "FAIL", label, seconds,
                note.empty() ? "" : " — ", note.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

template <class Fn>
void criterion(int number, const char* label, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
        ok = fn(note);
    } catch (const std::exception& e) {
        ok = false;
        note = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(number, label, ok, seconds, note);
}

System full_shift(std::vector<double> ratios, int suffix = 0) {
    SystemConfig cfg;
    const std::size_t a = ratios.size();
    cfg.ratios = std::move(ratios);
    cfg.incidence.assign(a, std::vector<int>(a, 1));
    cfg.suffix_letter = suffix;
    return validate_system(cfg);
}

Environment reference_env() {
    return validate_environment({{0.2, 1.0 / 7.0}, {0.5, 0.5}, 1e-9});
}

// Small random system for oracle sweeps: cyclic spine plus random edges.
System random_system(std::uint64_t seed) {
    CounterRng rng(seed);
    const int a = 2 + static_cast<int>(rng.draw(0) % 2);
    SystemConfig cfg;
    cfg.ratios.resize(static_cast<std::size_t>(a));
    cfg.incidence.assign(static_cast<std::size_t>(a), std::vector<int>(static_cast<std::size_t>(a), 0));
    std::uint64_t k = 1;
    for (int e = 0; e < a; ++e) {
        cfg.ratios[static_cast<std::size_t>(e)] = 0.15 + 0.45 * rng.uniform(k++);
        cfg.incidence[static_cast<std::size_t>(e)][static_cast<std::size_t>((e + 1) % a)] = 1;
        for (int e2 = 0; e2 < a; ++e2) {
            if (rng.uniform(k++) < 0.5) cfg.incidence[static_cast<std::size_t>(e)][static_cast<std::size_t>(e2)] = 1;
        }
    }
    cfg.suffix_letter = static_cast<int>(rng.draw(k) % static_cast<std::uint64_t>(a));
    return validate_system(cfg);
}

// Weights of every admissible suffix-compatible word of length <= n_cap,
// by direct recursion, independent of the composition census.
std::vector<double> brute_weights(const System& sys, int n_cap, const EnvironmentPath* path) {
    std::vector<double> out;
    const int a = sys.letters();
    std::vector<int> word(static_cast<std::size_t>(n_cap));
    const auto recurse = [&](auto&& self, int pos, double w) -> void {
        if (pos > 0 && sys.may_precede_suffix(word[static_cast<std::size_t>(pos) - 1])) {
            out.push_back(w - (path ? path->cum_log(static_cast<std::size_t>(pos)) : 0.0));
        }
        if (pos == n_cap) return;
        for (int e = 0; e < a; ++e) {
            if (pos > 0 && !sys.edge(word[static_cast<std::size_t>(pos) - 1], e)) continue;
            word[static_cast<std::size_t>(pos)] = e;
            self(self, pos + 1, w + sys.letter_weight(e));
        }
    };
    recurse(recurse, 0, 0.0);
    std::sort(out.begin(), out.end());
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path scratch(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("rcifs_accept_" + tag);
    fs::remove_all(dir);
    return dir;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <configs-dir>\n");
        return 2;
    }
    const fs::path configs_dir = argv[1];
    const System thirds = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const System halves_thirds = full_shift({0.5, 1.0 / 3.0});
    const Environment env61 = reference_env();

    criterion(1, "growth exponents match their closed forms", [&](std::string& note) {
        const double d = delta(thirds);
        const double d_ref = std::log(2.0) / std::log(3.0);
        const double dl = delta_lambda(thirds, env61);
        const double dl_ref =
            std::log(2.0) / (std::log(3.0) + 0.5 * std::log(5.0) + 0.5 * std::log(7.0));
        std::ostringstream os;
        os << "delta err " << std::fabs(d - d_ref) << ", expected-exponent err "
           << std::fabs(dl - dl_ref);
        note = os.str();
        return std::fabs(d - d_ref) <= 1e-10 && std::fabs(dl - dl_ref) <= 1e-9;
    });

    criterion(2, "counts equal brute-force enumeration on 50 randomized cases",
              [&](std::string& note) {
        int done = 0;
        for (std::uint64_t seed = 1; done < 50; ++seed) {
            const System sys = random_system(seed);
            CounterRng rng(seed * 7919 + 3);
            const Environment env = validate_environment(
                {{0.15 + 0.3 * rng.uniform(0), 0.55 + 0.3 * rng.uniform(1)}, {0.5, 0.5}, 1e-9});
            const EnvironmentPath path = sample_iid(env, seed, 40);

            for (const bool random : {false, true}) {
                const EnvironmentPath* p = random ? &path : nullptr;
                const std::vector<double> weights = brute_weights(sys, 12, p);
                // Threshold in general position: midpoint of a well-separated
                // gap below 4 so length 12 is exhaustive for both evaluators.
                double t = -1.0;
                const std::size_t start = 1 + static_cast<std::size_t>(rng.draw(100 + seed)) %
                                                  (weights.size() - 1);
                for (std::size_t j = start; j + 1 < weights.size(); ++j) {
                    if (weights[j + 1] - weights[j] > 1e-9 && weights[j + 1] < 4.0) {
                        t = 0.5 * (weights[j] + weights[j + 1]);
                        break;
                    }
                }
                if (t < 0.0) t = 0.5 * (weights[0] + weights[1]);
                const std::size_t expected = static_cast<std::size_t>(
                    std::upper_bound(weights.begin(), weights.end(), t) - weights.begin());

                CountingContext<ExactOps> ctx(sys, t, p);
                if (ctx.count(Threshold::raw(t), p) != BigInt(expected)) {
                    note = "mismatch at seed " + std::to_string(seed) +
                           (random ? " (path)" : " (flat)");
                    return false;
                }
            }
            ++done;
        }
        note = "50 cases, deterministic and path counts both exact";
        return true;
    });

    criterion(3, "deterministic growth ratio stays inside [0.9, 2.1] on the half-step grid",
              [&](std::string& note) {
        std::vector<double> grid;
        for (double t = 10.0; t <= 200.0 + 1e-9; t += 0.5) grid.push_back(t);
        const double exponent = std::log(2.0) / std::log(3.0);
        const CountingSeries series = counting_series<ExactOps>(thirds, nullptr, grid, exponent);
        double lo = 1e300, hi = -1e300;
        for (double r : series.log_ratio) {
            const double ratio = std::exp(r);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        std::ostringstream os;
        os << "ratio range [" << lo << ", " << hi << "] over " << grid.size() << " points";
        note = os.str();
        return lo >= 0.9 && hi <= 2.1;
    });

    criterion(4, "two-sided count bounds hold on 50 random balanced environments",
              [&](std::string& note) {
        std::size_t violations = 0;
        for (std::uint64_t seed = 500; seed < 550; ++seed) {
            CounterRng rng(seed);
            const double z0 = 0.10 + 0.35 * rng.uniform(0);
            const double z1 = 0.50 + 0.40 * rng.uniform(1);
            const double l0 = 0.15 + 0.70 * rng.uniform(2);
            const Environment env = validate_environment({{z0, z1}, {0.5, 0.5}, 1e-9});
            const EnvironmentPath path = make_balanced(env, {l0, 1.0 - l0}, 64);
            std::vector<double> grid;
            for (int j = 0; j < 20; ++j) grid.push_back(2.0 + 0.5 * j);
            violations += sandwich_check(thirds, path, grid).violations;
        }
        note = std::to_string(violations) + " violations over 50 environments x 20 thresholds";
        return violations == 0;
    });

    criterion(5, "random counts reduce exactly to deterministic counts for n <= 200",
              [&](std::string& note) {
        std::vector<int> ns;
        for (int n = 1; n <= 200; ++n) ns.push_back(n);
        std::size_t violations = 0, checked = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const EnvironmentPath path = sample_iid(env61, seed, 240);
            const ReductionReport rep = reduction_identity_check(thirds, path, ns);
            violations += rep.violations;
            checked += rep.checked;
        }
        note = std::to_string(violations) + " violations in " + std::to_string(checked) +
               " exact identities";
        return violations == 0 && checked == 2000;
    });

    criterion(6, "ergodic-sum brackets hold at every crossing time", [&](std::string& note) {
        std::size_t violations = 0, checked = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const EnvironmentPath path = sample_iid(env61, seed, 10000);
            for (long m = -3; m <= 3; ++m) {
                const std::vector<std::size_t> times = crossing_times(path, 0, 0.5, m);
                const CrossingBracketReport rep =
                    crossing_bracket_check(thirds, path, 0.5, m, times);
                violations += rep.violations;
                checked += rep.checked;
            }
        }
        note = std::to_string(violations) + " violations in " + std::to_string(checked) +
               " crossings";
        return violations == 0 && checked > 1000;
    });

    criterion(7, "constructed paths swing the count ratio by 100x inside the measured bracket",
              [&](std::string& note) {
        const FluctuationReport rep = fluctuation_demo(thirds, env61, {-60, 60}, 400);
        std::ostringstream os;
        os << "log spread " << rep.log_spread << " (need >= " << std::log(100.0) << "), "
           << rep.violations << " bracket violations";
        note = os.str();
        return rep.violations == 0 && rep.log_spread >= std::log(100.0);
    });

    criterion(8, "series evaluators agree with the geometric closed form", [&](std::string& note) {
        const Environment fifth = validate_environment({{0.2}, {1.0}, 1e-9});
        const EnvironmentPath constant = make_eventually_periodic(fifth, {}, {0}, 80);
        const SeriesEvaluation ev = eta_partial(halves_thirds, constant, {1.0, 0.0}, 60);
        const double err_geo = std::abs(ev.partial_sums.back() - std::complex<double>(0.2, 0.0));

        const std::complex<double> s(1.0, 2.0);
        const EnvironmentPath alt = make_eventually_periodic(env61, {}, {0, 1}, 220);
        const std::complex<double> closed =
            eta_closed_periodic(halves_thirds, {}, {0.2, 1.0 / 7.0}, s);
        const SeriesEvaluation part = eta_partial(halves_thirds, alt, s, 200);
        const double err_closed = std::abs(closed - part.partial_sums.back());

        std::ostringstream os;
        os << "geometric err " << err_geo << ", closed-vs-truncated err " << err_closed;
        note = os.str();
        return err_geo <= 1e-12 && err_closed <= 1e-10;
    });

    criterion(9, "zero scan isolates one simple real zero with a clean off-axis margin",
              [&](std::string& note) {
        ThetaParams params;
        params.cycle = {0.2};
        const ZeroScanResult scan = zero_scan(params, 20.0, 0.005);
        const double x_ref = 0.277300794874198525;
        std::ostringstream os;
        os << scan.zeros.size() << " zero(s), x0 err "
           << (scan.zeros.empty() ? -1.0 : std::fabs(scan.zeros[0].x - x_ref))
           << ", off-axis floor " << scan.min_offaxis_abs;
        note = os.str();
        if (scan.zeros.size() != 1) return false;
        const ThetaZero& z = scan.zeros[0];
        return std::fabs(z.x - x_ref) <= 1e-6 && std::fabs(z.y) <= 1e-6 && z.simple &&
               z.abs_theta_prime > 0.1 && scan.min_offaxis_abs > 1e-3;
    });

    criterion(10, "the three one-parameter exponents coincide", [&](std::string& note) {
        CounterRng rng(321);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const double z = 0.05 + 0.90 * rng.uniform(static_cast<std::uint64_t>(trial));
            const double a = delta_periodic(thirds, {z}, {});
            const double b = delta_bounded_fluctuation(thirds, std::log(z));
            const double other = z < 0.5 ? 0.9 : 0.1;
            const Environment degenerate = validate_environment({{z, other}, {1.0, 0.0}, 1e-9});
            const double c = delta_lambda(thirds, degenerate);
            worst = std::max({worst, std::fabs(a - b), std::fabs(b - c), std::fabs(a - c)});
        }
        std::ostringstream os;
        os << "max pairwise gap " << worst;
        note = os.str();
        return worst <= 1e-10;
    });

    criterion(11, "crossing counts and the iterated-logarithm envelope hold for 90 of 100 seeds",
              [&](std::string& note) {
        int crossings_ok = 0, lil_ok = 0;
        for (std::uint64_t seed = 19001; seed <= 19100; ++seed) {
            const EnvironmentPath path = sample_iid(env61, seed, 1000000);
            const std::vector<std::size_t> times = crossing_times(path, 0, 0.5, 0);
            std::size_t early = 0;
            for (std::size_t k : times) {
                if (k < 100000) ++early;
            }
            if (early >= 50) ++crossings_ok;
            const LilSeries lil = lil_statistics(path, 0, 0.5);
            const double peak = lil.max_over(1000, path.length());
            if (peak > 0.35 && peak < 1.8) ++lil_ok;
        }
        note = "crossings " + std::to_string(crossings_ok) + "/100, envelope " +
               std::to_string(lil_ok) + "/100";
        return crossings_ok >= 90 && lil_ok >= 90;
    });

    criterion(12, "exact and log-space counts agree to 1e-9 through depth 300",
              [&](std::string& note) {
        double worst = 0.0;
        {
            std::vector<double> grid;
            for (int j = 0; j < 100; ++j) grid.push_back(1.0 + 3.28 * j);
            const CountingSeries exact = counting_series<ExactOps>(thirds, nullptr, grid, 0.5);
            const CountingSeries logged = counting_series<LogOps>(thirds, nullptr, grid, 0.5);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                worst = std::max(worst, std::fabs(exact.log_count[j] - logged.log_count[j]));
            }
        }
        {
            const EnvironmentPath path = sample_iid(env61, 1, 320);
            std::vector<double> grid;
            for (int j = 0; j < 100; ++j) grid.push_back(2.0 + 8.0 * j);
            const CountingSeries exact = counting_series<ExactOps>(thirds, &path, grid, 0.5);
            const CountingSeries logged = counting_series<LogOps>(thirds, &path, grid, 0.5);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                if (std::isinf(exact.log_count[j]) && std::isinf(logged.log_count[j])) continue;
                worst = std::max(worst, std::fabs(exact.log_count[j] - logged.log_count[j]));
            }
        }
        std::ostringstream os;
        os << "worst log gap " << worst;
        note = os.str();
        return worst <= 1e-9;
    });

    criterion(13, "every bundled config reruns to byte-identical output", [&](std::string& note) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(configs_dir)) {
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            note = "no configs found in " + configs_dir.string();
            return false;
        }
        int ran = 0;
        for (const fs::path& file : files) {
            const ExperimentConfig config = parse_config(read_file(file));
            const fs::path dir_a = scratch(file.stem().string() + "_a");
            const fs::path dir_b = scratch(file.stem().string() + "_b");
            const ScenarioResult first = run_experiment(config, dir_a.string());
            const ScenarioResult second = run_experiment(config, dir_b.string());
            bool same = first.pass && second.pass && first.files.size() == second.files.size();
            for (std::size_t j = 0; same && j < first.files.size(); ++j) {
                same = fs::path(first.files[j]).filename() == fs::path(second.files[j]).filename() &&
                       read_file(first.files[j]) == read_file(second.files[j]);
            }
            fs::remove_all(dir_a);
            fs::remove_all(dir_b);
            if (!same) {
                note = "divergence or failure in " + file.filename().string();
                return false;
            }
            ++ran;
        }
        note = std::to_string(ran) + " configs, each run twice";
        return true;
    });

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 13 criteria passed\n");
    return 0;
}
