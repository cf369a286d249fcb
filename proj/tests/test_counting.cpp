// Counting layer: the composition census, weighted views, raw and anchored
// threshold queries (deterministic and along environment paths), the exact
// tie lattice, and the consistency checks built on the counts. Frozen
// numbers were computed with an independent brute-force enumerator; the
// enumerator itself is validated in the symbolic suite.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "rcifs/bigint.hpp"
#include "rcifs/composition_table.hpp"
#include "rcifs/counting.hpp"
#include "rcifs/environment.hpp"
#include "rcifs/errors.hpp"
#include "rcifs/rng.hpp"
#include "rcifs/system.hpp"
#include "rcifs/transfer.hpp"
#include "rcifs/weight_lattice.hpp"

#include "test_support.hpp"

using rcifs_test::brute_count;
using rcifs_test::error_code;
using rcifs_test::full_shift;
using rcifs_test::golden_mean;
using rcifs_test::one_value;
using rcifs_test::random_system;
using rcifs_test::two_values;

namespace {

// Composition index of a given multiplicity vector in row n (linear scan;
// tables in these tests are tiny).
template <class Ops>
std::size_t find_composition(const rcifs::CompositionTable<Ops>& table, int n,
                             const std::vector<std::int64_t>& kappa) {
    std::vector<std::int64_t> probe(kappa.size());
    for (std::size_t ci = 0; ci < table.comp_count(n); ++ci) {
        table.composition(n, ci, probe.data());
        if (probe == kappa) return ci;
    }
    REQUIRE_MESSAGE(false, "composition not found in row");
    return 0;
}

// Weights of every admissible word of length <= n_cap, by direct recursion:
// sum of letter weights, minus the realized cumulative log when a path is
// given. Independent of the composition table.
std::vector<double> brute_weights(const rcifs::System& sys, int n_cap,
                                  const rcifs::EnvironmentPath* path) {
    std::vector<double> out;
    const int a = sys.letters();
    std::vector<int> word(static_cast<std::size_t>(n_cap));
    const auto recurse = [&](auto&& self, int pos, double w) -> void {
        if (pos > 0 && sys.may_precede_suffix(word[static_cast<std::size_t>(pos) - 1])) {
            const double lam = path ? path->cum_log(static_cast<std::size_t>(pos)) : 0.0;
            out.push_back(w - lam);
        }
        if (pos == n_cap) return;
        for (int e = 0; e < a; ++e) {
            if (pos > 0 && !sys.edge(word[static_cast<std::size_t>(pos) - 1], e)) continue;
            word[static_cast<std::size_t>(pos)] = e;
            self(self, pos + 1, w + sys.letter_weight(e));
        }
    };
    recurse(recurse, 0, 0.0);
    return out;
}

rcifs::BigInt exact_count(const rcifs::System& sys, double t, const rcifs::EnvironmentPath* path) {
    rcifs::CountingContext<rcifs::ExactOps> ctx(sys, t, path);
    return ctx.count(rcifs::Threshold::raw(t), path);
}

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);
const double kLog5 = std::log(5.0);
const double kLog7 = std::log(7.0);

} // namespace

TEST_CASE("composition census matches hand-enumerated rows") {
    const rcifs::System full = full_shift({1.0 / 3.0, 1.0 / 3.0});
    rcifs::CompositionTable<rcifs::ExactOps> table(full, 4);
    CHECK(table.comp_count(2) == 3);
    CHECK(table.suffix_count(2, find_composition(table, 2, {2, 0})) == 1);
    CHECK(table.suffix_count(2, find_composition(table, 2, {1, 1})) == 2);
    CHECK(table.suffix_count(2, find_composition(table, 2, {0, 2})) == 1);

    // Constrained shift: letter 1 may not follow itself; suffix letter 0.
    const rcifs::System golden = golden_mean(1.0 / 3.0, 1.0 / 3.0);
    rcifs::CompositionTable<rcifs::ExactOps> gtable(golden, 4);
    CHECK(gtable.suffix_count(3, find_composition(gtable, 3, {3, 0})) == 1);
    CHECK(gtable.suffix_count(3, find_composition(gtable, 3, {2, 1})) == 3);
    CHECK(gtable.suffix_count(3, find_composition(gtable, 3, {1, 2})) == 1);
    CHECK(gtable.suffix_count(3, find_composition(gtable, 3, {0, 3})) == 0);
}

TEST_CASE("per-last-letter detail satisfies the census recurrence") {
    for (const std::uint64_t seed : {3u, 9u, 14u}) {
        const rcifs::System sys = random_system(seed);
        const int a = sys.letters();
        rcifs::CompositionTable<rcifs::ExactOps> table(sys, 9);
        REQUIRE(table.has_detail());

        // Row 1: one word per letter, composition = the letter's unit vector.
        std::vector<std::int64_t> kappa(static_cast<std::size_t>(a));
        for (std::size_t ci = 0; ci < table.comp_count(1); ++ci) {
            table.composition(1, ci, kappa.data());
            for (int e = 0; e < a; ++e) {
                const bool unit = kappa[static_cast<std::size_t>(e)] == 1;
                CHECK(table.last_letter(1, ci, e) == (unit ? 1 : 0));
            }
        }

        for (int n = 1; n < 9; ++n) {
            // Index row n by composition for O(1) predecessor lookup.
            std::map<std::vector<std::int64_t>, std::size_t> row_n;
            for (std::size_t ci = 0; ci < table.comp_count(n); ++ci) {
                table.composition(n, ci, kappa.data());
                row_n[kappa] = ci;
            }
            for (std::size_t ci2 = 0; ci2 < table.comp_count(n + 1); ++ci2) {
                table.composition(n + 1, ci2, kappa.data());
                for (int e2 = 0; e2 < a; ++e2) {
                    rcifs::BigInt expect = 0;
                    if (kappa[static_cast<std::size_t>(e2)] >= 1) {
                        auto prev = kappa;
                        prev[static_cast<std::size_t>(e2)] -= 1;
                        const auto it = row_n.find(prev);
                        REQUIRE(it != row_n.end());
                        for (int e = 0; e < a; ++e) {
                            if (sys.edge(e, e2)) expect += table.last_letter(n, it->second, e);
                        }
                    }
                    CHECK(table.last_letter(n + 1, ci2, e2) == expect);
                }
            }
            // The suffix-compatible count is the detail row filtered by the
            // suffix's incidence column.
            for (std::size_t ci = 0; ci < table.comp_count(n); ++ci) {
                rcifs::BigInt expect = 0;
                for (int e = 0; e < a; ++e) {
                    if (sys.may_precede_suffix(e)) expect += table.last_letter(n, ci, e);
                }
                CHECK(table.suffix_count(n, ci) == expect);
            }
        }
    }
}

TEST_CASE("census row sums reproduce the brute-force word counts") {
    for (const std::uint64_t seed : {5u, 11u, 23u}) {
        const rcifs::System sys = random_system(seed);
        rcifs::CompositionTable<rcifs::ExactOps> table(sys, 9);
        for (int n = 1; n <= 9; ++n) {
            rcifs::BigInt total = 0;
            for (const auto& v : table.suffix_row(n)) total += v;
            CHECK(total == brute_count(sys, n));
        }
    }
}

TEST_CASE("census construction enforces the documented caps") {
    const rcifs::System four = full_shift({0.3, 0.3, 0.3, 0.05});
    CHECK(error_code([&] { rcifs::CompositionTable<rcifs::ExactOps>(four, 4); }) == "alphabet_too_large");

    const rcifs::System two = full_shift({0.4, 0.4});
    CHECK(error_code([&] { rcifs::CompositionTable<rcifs::LogOps>(two, 20001); }) == "n_max_exceeded");
    const rcifs::System three = full_shift({0.3, 0.3, 0.3});
    CHECK(error_code([&] { rcifs::CompositionTable<rcifs::LogOps>(three, 801); }) == "n_max_exceeded");
}

TEST_CASE("weighted view rows are sorted with consistent prefix sums") {
    const rcifs::System sys = full_shift({0.5, 0.125});
    rcifs::CompositionTable<rcifs::ExactOps> table(sys, 8);
    rcifs::WeightedView<rcifs::ExactOps> view(table, {});
    CHECK(view.standard_weights());
    CHECK(view.min_letter_weight() == doctest::Approx(kLog2));
    CHECK(view.max_letter_weight() == doctest::Approx(sys.letter_weight(1)));

    for (int n = 1; n <= 8; ++n) {
        const auto& row = view.row(n);
        REQUIRE(row.weight.size() == table.comp_count(n));
        rcifs::BigInt running = 0;
        for (std::size_t r = 0; r < row.weight.size(); ++r) {
            if (r > 0) CHECK(row.weight[r] >= row.weight[r - 1]);
            running += table.suffix_count(n, row.comp[r]);
            CHECK(row.prefix[r] == running);
        }
        CHECK(view.row_count_at_most(n, row.weight.front() - 1e-9) == 0);
        CHECK(view.row_count_at_most(n, row.weight.back() + 1e-9) == running);
    }
}

TEST_CASE("threshold constructors expose their anchor data") {
    const rcifs::System sys = full_shift({0.5, 0.125});
    const rcifs::Threshold raw = rcifs::Threshold::raw(2.5);
    CHECK_FALSE(raw.is_anchored());
    CHECK(raw.value() == 2.5);
    CHECK(raw.kappa().empty());

    const rcifs::Threshold flat = rcifs::Threshold::anchored(sys, {2, 0}, nullptr, 0);
    CHECK(flat.is_anchored());
    CHECK(flat.value() == doctest::Approx(2.0 * kLog2).epsilon(1e-15));
    CHECK(flat.kappa() == std::vector<std::int64_t>{2, 0});
    CHECK(flat.env_counts().empty());

    const rcifs::Environment env = two_values(0.2, 1.0 / 7.0);
    const rcifs::EnvironmentPath alt = rcifs::make_eventually_periodic(env, {}, {0, 1}, 16);
    const rcifs::System thirds = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::Threshold anchored = rcifs::Threshold::anchored(thirds, {2, 0}, &alt, 2);
    CHECK(anchored.value() == doctest::Approx(2.0 * kLog3 + kLog5 + kLog7).epsilon(1e-15));
    CHECK(anchored.env_counts() == std::vector<std::int64_t>{1, 1});
    CHECK(anchored.anchor_path() == &alt);

    CHECK(error_code([&] { rcifs::Threshold::anchored(thirds, {1, 0}, &alt, 17); }) == "path_too_short");
}

TEST_CASE("deterministic counts: frozen values and the equal-ratio closed form") {
    const rcifs::System sys = full_shift({1.0 / 3.0, 1.0 / 3.0});
    CHECK(exact_count(sys, 1.0, nullptr) == 0);  // shortest word already weighs log 3
    CHECK(exact_count(sys, 2.5, nullptr) == 6);  // lengths 1 and 2: 2 + 4 words

    // Every admissible word of length n weighs exactly n log 3, so the count
    // below T is sum_{n <= floor(T/log3)} 2^n = 2^{floor(T/log3)+1} - 2.
    for (const double t : {1.2, 2.3, 3.7, 5.5, 8.05, 12.4, 16.9, 19.2}) {
        const auto n = static_cast<std::int64_t>(std::floor(t / kLog3));
        const rcifs::BigInt expect = (rcifs::BigInt(1) << (n + 1)) - 2;
        CHECK(exact_count(sys, t, nullptr) == expect);
    }

    const rcifs::System mixed = full_shift({0.5, 1.0 / 3.0});
    // Words 0, 1, 00, 01, 10 weigh log2, log3, log4, log6, log6; 000 and 11
    // already exceed log 6. The epsilon clears float jitter in the cutoff.
    CHECK(exact_count(mixed, std::log(6.0) + 1e-9, nullptr) == 5);
}

TEST_CASE("deterministic counts are nondecreasing in the threshold") {
    const rcifs::System sys = random_system(31);
    rcifs::CountingContext<rcifs::ExactOps> ctx(sys, 9.0, nullptr);
    rcifs::BigInt prev = -1;
    for (double t = 0.25; t <= 9.0; t += 0.25) {
        const rcifs::BigInt here = ctx.count(rcifs::Threshold::raw(t), nullptr);
        CHECK(here >= prev);
        prev = here;
    }
}

TEST_CASE("random counts along the alternating path: frozen values") {
    const rcifs::System sys = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::Environment env = two_values(0.2, 1.0 / 7.0);
    const rcifs::EnvironmentPath alt = rcifs::make_eventually_periodic(env, {}, {0, 1}, 64);

    // Realized weight of a length-n word is n log3 - Lambda_n with
    // Lambda_2k = -k(log5 + log7): lengths 1, 2, 3 weigh ~2.708, ~5.753,
    // ~8.461, so T = 3.5 keeps length 1 only and T = 10 reaches length 3.
    CHECK(exact_count(sys, 3.5, &alt) == 2);
    CHECK(exact_count(sys, 10.0, &alt) == 14);

    // Anchor exactly at the length-2 lattice point: the whole length-2 row
    // ties with the cutoff and must be counted (closed inequality, resolved
    // in the integer lattice, not in floats).
    rcifs::CountingContext<rcifs::ExactOps> ctx(sys, 6.0, &alt);
    const rcifs::Threshold t2 = rcifs::Threshold::anchored(sys, {2, 0}, &alt, 2);
    CHECK(ctx.count(t2, &alt) == 6);
}

TEST_CASE("anchored thresholds resolve dyadic ties exactly") {
    // alpha = (1/2, 1/8): every weight is an integer number of log-2 units
    // (letter 1 counts for three), so distinct compositions collide
    // constantly and the float image cannot be trusted at the cutoff.
    const rcifs::System sys = full_shift({0.5, 0.125});
    rcifs::CountingContext<rcifs::ExactOps> ctx(sys, 8.0 * kLog2, nullptr);

    const auto anchored_count = [&](std::vector<std::int64_t> kappa) {
        return ctx.count(rcifs::Threshold::anchored(sys, std::move(kappa), nullptr, 0), nullptr);
    };
    CHECK(anchored_count({2, 0}) == 2);  // <= 2 units: 0, 00
    CHECK(anchored_count({3, 0}) == 4);  // <= 3 units: adds 1 and 000
    CHECK(anchored_count({0, 2}) == 17); // <= 6 units
}

TEST_CASE("weight lattice decides signs exactly") {
    const rcifs::System dyadic = full_shift({0.5, 0.125});
    const rcifs::WeightLattice lattice(dyadic, nullptr);
    CHECK(lattice.slots() == 2);
    CHECK_FALSE(lattice.has_value_slots());
    // (1/2)^3 = 1/8 exactly: three letter-0 steps tie one letter-1 step.
    CHECK(lattice.sign({3, -1}) == 0);
    CHECK(lattice.exact_sign({3, -1}) == 0);
    CHECK(lattice.sign({2, -1}) == -1);
    CHECK(lattice.sign({4, -1}) == +1);
    CHECK(lattice.sign({0, 0}) == 0);

    // 0.3^2 vs 0.09: as reals these are equal, but as doubles 0.3*0.3
    // rounds below 0.09, so the true sign of 2*(-log 0.3) - (-log 0.09) is
    // +1 while the float evaluation sits at zero. Only the exact branch
    // gets this right.
    const rcifs::System near = full_shift({0.3, 0.09});
    const rcifs::WeightLattice tight(near, nullptr);
    const double float_eval = 2.0 * near.letter_weight(0) - near.letter_weight(1);
    CHECK(std::abs(float_eval) < 1e-15);
    CHECK(tight.sign({2, -1}) == +1);
    CHECK(tight.exact_sign({2, -1}) == +1);
}

TEST_CASE("weight lattice deduplicates bases across letters and path values") {
    const rcifs::System thirds = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::WeightLattice collapsed(thirds, nullptr);
    CHECK(collapsed.slots() == 1);
    CHECK(collapsed.letter_slot(0) == collapsed.letter_slot(1));

    const rcifs::Environment env = two_values(0.2, 1.0 / 7.0);
    const rcifs::EnvironmentPath alt = rcifs::make_eventually_periodic(env, {}, {0, 1}, 8);
    const rcifs::WeightLattice joint(thirds, &alt);
    CHECK(joint.slots() == 3);
    CHECK(joint.has_value_slots());
    CHECK(joint.value_slot(0) != joint.value_slot(1));
    CHECK(joint.neg_log(joint.value_slot(0)) == doctest::Approx(kLog5).epsilon(1e-15));

    // A modulus equal (as a double) to a contraction ratio shares its slot.
    const rcifs::System mixed = full_shift({0.5, 1.0 / 3.0});
    const rcifs::Environment env2 = two_values(0.5, 0.2);
    const rcifs::EnvironmentPath path2 = rcifs::make_eventually_periodic(env2, {}, {0, 1}, 8);
    const rcifs::WeightLattice shared(mixed, &path2);
    CHECK(shared.slots() == 3);
    CHECK(shared.value_slot(0) == shared.letter_slot(0));
}

TEST_CASE("unit-modulus paths reproduce the deterministic counts exactly") {
    const rcifs::System sys = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::Environment env = rcifs::validate_environment({{1.0, 0.5}, {0.5, 0.5}, 1e-9});
    const rcifs::EnvironmentPath ones = rcifs::make_eventually_periodic(env, {}, {0}, 40);

    rcifs::CountingContext<rcifs::ExactOps> random_ctx(sys, 12.0, &ones);
    rcifs::CountingContext<rcifs::ExactOps> det_ctx(sys, 12.0, nullptr);
    for (double t = 1.0; t <= 12.0; t += 1.0) {
        const rcifs::Threshold thr = rcifs::Threshold::raw(t);
        CHECK(random_ctx.count(thr, &ones) == det_ctx.count(thr, nullptr));
    }

    const std::vector<double> grid{2.0, 5.0, 9.0};
    const auto with_path = rcifs::counting_series<rcifs::ExactOps>(sys, &ones, grid, 0.5);
    const auto without = rcifs::counting_series<rcifs::ExactOps>(sys, nullptr, grid, 0.5);
    CHECK(with_path.count_text == without.count_text);
}

TEST_CASE("exact and log backends agree within the certified error") {
    const rcifs::System sys = full_shift({0.5, 1.0 / 3.0});
    std::vector<double> grid;
    for (double t = 1.0; t <= 300.0; t += 7.3) grid.push_back(t);

    const auto exact = rcifs::counting_series<rcifs::ExactOps>(sys, nullptr, grid, 0.5);
    const auto logged = rcifs::counting_series<rcifs::LogOps>(sys, nullptr, grid, 0.5);
    CHECK(exact.exact);
    CHECK(exact.certified_rel_error == 0.0);
    CHECK_FALSE(logged.exact);
    CHECK(logged.certified_rel_error > 0.0);
    CHECK(logged.certified_rel_error < 1e-9);
    CHECK(logged.count_text.front().empty());

    REQUIRE(exact.log_count.size() == grid.size());
    REQUIRE(logged.log_count.size() == grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        // Absolute difference of logs == relative difference of counts.
        CHECK(std::abs(exact.log_count[j] - logged.log_count[j]) <= 1e-9);
        CHECK(exact.log_ratio[j] ==
              doctest::Approx(exact.log_count[j] - 0.5 * grid[j]).epsilon(1e-12));
    }
    CHECK(exact.grid == grid);

    // Counts as decimal text stay consistent with their logs.
    CHECK(exact.count_text.back() != "0");
    CHECK(std::isfinite(exact.log_count.back()));
}

TEST_CASE("counts match brute-force enumeration on randomized cases") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const rcifs::System sys = random_system(seed);
        rcifs::CounterRng rng(seed * 977 + 5);
        const rcifs::Environment env =
            two_values(0.15 + 0.3 * rng.uniform(0), 0.55 + 0.3 * rng.uniform(1));
        const rcifs::EnvironmentPath path = rcifs::sample_iid(env, seed, 40);

        for (const bool random : {false, true}) {
            const rcifs::EnvironmentPath* p = random ? &path : nullptr;
            auto weights = brute_weights(sys, 12, p);
            std::sort(weights.begin(), weights.end());

            // Probe at midpoints of well-separated gaps so float jitter in
            // either evaluator cannot flip a comparison, plus both extremes.
            std::vector<double> probes{weights.front() - 0.5, weights.back() + 0.5};
            for (std::size_t j = 0; j + 1 < weights.size() && probes.size() < 8; ++j) {
                if (weights[j + 1] - weights[j] > 1e-6 && weights[j] < 4.0) {
                    probes.push_back(0.5 * (weights[j] + weights[j + 1]));
                }
            }
            for (const double t : probes) {
                if (t > 4.0 || t < 0.0) continue; // keep length 12 exhaustive
                const std::size_t expect = static_cast<std::size_t>(
                    std::upper_bound(weights.begin(), weights.end(), t) - weights.begin());
                CHECK(exact_count(sys, t, p) == rcifs::BigInt(expect));
            }
        }
    }
}

TEST_CASE("census weight sums factor through the transfer matrix") {
    const rcifs::System sys = golden_mean(0.5, 1.0 / 3.0);
    const rcifs::Environment env = two_values(0.2, 1.0 / 7.0);
    const rcifs::EnvironmentPath path = rcifs::sample_iid(env, 3, 60);
    rcifs::CompositionTable<rcifs::ExactOps> table(sys, 50);

    std::vector<std::int64_t> kappa(2);
    for (const double x : {0.3, 0.6}) {
        const Eigen::MatrixXd m = rcifs::transfer_matrix_real(sys, x);
        Eigen::VectorXd v = Eigen::VectorXd::Ones(2);
        for (int n = 1; n <= 50; ++n) {
            v = m * v;
            const double lambda = path.cum_log(static_cast<std::size_t>(n));
            double lhs = 0.0;
            for (std::size_t ci = 0; ci < table.comp_count(n); ++ci) {
                table.composition(n, ci, kappa.data());
                const double w = static_cast<double>(kappa[0]) * sys.letter_weight(0) +
                                 static_cast<double>(kappa[1]) * sys.letter_weight(1);
                lhs += table.suffix_count(n, ci).convert_to<double>() * std::exp(-x * (w - lambda));
            }
            const double rhs = std::exp(x * lambda) * v(sys.suffix_letter());
            // Compare as a ratio: the magnitudes drift over many decades as
            // n grows, which would turn a plain tolerance into a no-op.
            CHECK(lhs / rhs == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("sandwich bounds: frozen alternating-path instance") {
    const rcifs::System sys = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::Environment env = two_values(0.2, 1.0 / 7.0);
    const rcifs::EnvironmentPath alt = rcifs::make_eventually_periodic(env, {}, {0, 1}, 64);

    const auto report = rcifs::sandwich_check(sys, alt, {10.0});
    CHECK(report.c == doctest::Approx(-0.5 * (kLog5 + kLog7)).epsilon(1e-12));
    CHECK(report.d == doctest::Approx(-(kLog5 + kLog7)).epsilon(1e-12));
    CHECK(report.cert_lo == -0.5);
    CHECK(report.cert_hi == 0.5);
    CHECK(report.violations == 0);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].lower == 6);
    CHECK(report.rows[0].mid == 14);
    CHECK(report.rows[0].upper == 30);
    CHECK(report.rows[0].ok);

    // A longer grid on the same certificate still holds everywhere.
    std::vector<double> grid;
    for (double t = 2.0; t <= 14.0; t += 0.5) grid.push_back(t);
    CHECK(rcifs::sandwich_check(sys, alt, grid).violations == 0);
}

TEST_CASE("sandwich bounds collapse to equality on a constant path") {
    // Certificate frequencies (1, 0) make the drift shift equal the realized
    // per-step log exactly, and the certificate band is [0, 0].
    const rcifs::System sys = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::Environment env = two_values(0.2, 1.0 / 7.0);
    const rcifs::EnvironmentPath constant = rcifs::make_eventually_periodic(env, {}, {0}, 40);

    const auto report = rcifs::sandwich_check(sys, constant, {2.0, 4.0, 6.0, 8.0});
    CHECK(report.cert_lo == 0.0);
    CHECK(report.cert_hi == 0.0);
    CHECK(report.violations == 0);
    for (const auto& row : report.rows) {
        CHECK(row.lower == row.mid);
        CHECK(row.mid == row.upper);
    }

    const rcifs::EnvironmentPath iid = rcifs::sample_iid(env, 9, 64);
    CHECK(error_code([&] { rcifs::sandwich_check(sys, iid, {5.0}); }) == "certificate_missing");
}

TEST_CASE("sandwich bounds hold for a greedy balanced path") {
    const rcifs::System sys = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::Environment env =
        rcifs::validate_environment({{0.2, 1.0 / 7.0}, {0.3, 0.7}, 1e-9});
    const rcifs::EnvironmentPath path = rcifs::make_balanced(env, {0.3, 0.7}, 64);
    std::vector<double> grid;
    for (double t = 2.0; t <= 10.0; t += 1.0) grid.push_back(t);
    const auto report = rcifs::sandwich_check(sys, path, grid);
    CHECK(report.violations == 0);
    CHECK(report.rows.size() == grid.size());
}

TEST_CASE("reduction identity: frozen, closed-form, and sampled paths") {
    const rcifs::System sys = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::Environment env = two_values(0.2, 1.0 / 7.0);

    const rcifs::EnvironmentPath alt = rcifs::make_eventually_periodic(env, {}, {0, 1}, 64);
    const auto frozen = rcifs::reduction_identity_check(sys, alt, {2});
    CHECK(frozen.checked == 1);
    CHECK(frozen.violations == 0);
    CHECK(frozen.failed_n.empty());

    // Unit moduli: the random anchored count IS the deterministic count, and
    // the deterministic side has the closed form 2^{n+1} - 2.
    const rcifs::Environment unit = rcifs::validate_environment({{1.0, 0.5}, {0.5, 0.5}, 1e-9});
    const rcifs::EnvironmentPath ones = rcifs::make_eventually_periodic(unit, {}, {0}, 40);
    rcifs::CountingContext<rcifs::ExactOps> ctx(sys, 9.0 * kLog3, &ones);
    std::vector<int> small_ns;
    for (int n = 1; n <= 8; ++n) {
        small_ns.push_back(n);
        std::vector<std::int64_t> kappa{n, 0};
        const rcifs::Threshold thr =
            rcifs::Threshold::anchored(sys, kappa, &ones, static_cast<std::size_t>(n));
        CHECK(ctx.count(thr, &ones) == (rcifs::BigInt(1) << (n + 1)) - 2);
    }
    CHECK(rcifs::reduction_identity_check(sys, ones, small_ns).violations == 0);

    const rcifs::EnvironmentPath iid = rcifs::sample_iid(env, 42, 120);
    std::vector<int> ns;
    for (int n = 1; n <= 50; ++n) ns.push_back(n);
    const auto sampled = rcifs::reduction_identity_check(sys, iid, ns);
    CHECK(sampled.checked == 50);
    CHECK(sampled.violations == 0);

    const rcifs::System mixed = full_shift({0.5, 1.0 / 3.0});
    CHECK(error_code([&] { rcifs::reduction_identity_check(mixed, alt, {2}); }) ==
          "ratios_not_equal");
}

TEST_CASE("crossing brackets: exact slack on the alternating path") {
    const rcifs::System sys = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::Environment env = two_values(0.2, 1.0 / 7.0);
    const rcifs::EnvironmentPath alt = rcifs::make_eventually_periodic(env, {}, {0, 1}, 64);

    // At the crossing n = 4 (s_4 = 2, p = 1/2, m = 0) the bracket's slack
    // around the realized sum is exactly one step of each modulus:
    // value - lower = -log(1/7), upper - value = -log(1/5).
    const auto report = rcifs::crossing_bracket_check(sys, alt, 0.5, 0, {4});
    CHECK(report.checked == 1);
    CHECK(report.violations == 0);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].n == 4);
    CHECK(report.rows[0].ok);
    CHECK(report.rows[0].value - report.rows[0].lower == doctest::Approx(kLog7).epsilon(1e-12));
    CHECK(report.rows[0].upper - report.rows[0].value == doctest::Approx(kLog5).epsilon(1e-12));

    // Sampled path: every crossing of the centered walk satisfies the bracket.
    const rcifs::EnvironmentPath iid = rcifs::sample_iid(env, 5, 2000);
    const auto crossings = rcifs::crossing_times(iid, 0, 0.5, 0);
    CHECK(crossings.size() > 10);
    const auto sampled = rcifs::crossing_bracket_check(sys, iid, 0.5, 0, crossings);
    CHECK(sampled.checked == crossings.size());
    CHECK(sampled.violations == 0);

    const rcifs::System mixed = full_shift({0.5, 1.0 / 3.0});
    CHECK(error_code([&] { rcifs::crossing_bracket_check(mixed, alt, 0.5, 0, {2}); }) ==
          "ratios_not_equal");
    const rcifs::Environment env3 =
        rcifs::validate_environment({{0.2, 1.0 / 7.0, 0.5}, {0.3, 0.3, 0.4}, 1e-9});
    const rcifs::EnvironmentPath triple = rcifs::make_eventually_periodic(env3, {}, {0, 1, 2}, 30);
    CHECK(error_code([&] { rcifs::crossing_bracket_check(sys, triple, 0.5, 0, {3}); }) ==
          "not_two_values");
    CHECK(error_code([&] { rcifs::crossing_bracket_check(sys, alt, 0.5, 0, {65}); }) ==
          "path_too_short");
}

TEST_CASE("fluctuation demonstration stays inside its measured bracket") {
    const rcifs::System sys = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::Environment env = two_values(0.2, 1.0 / 7.0);

    const auto center = rcifs::fluctuation_demo(sys, env, {0}, 100);
    CHECK(center.delta == doctest::Approx(std::log(2.0) / kLog3).epsilon(1e-10));
    CHECK(center.delta_lambda == doctest::Approx(0.240986850259555802).epsilon(1e-9));
    CHECK(center.log_c_meas <= center.log_d_meas);
    CHECK(center.certified_rel_error > 0.0);
    CHECK(center.violations == 0);
    REQUIRE(center.rows.size() == 1);
    CHECK(center.rows[0].m == 0);
    CHECK(center.rows[0].ok);
    CHECK(center.rows[0].lo <= center.rows[0].log_ratio);
    CHECK(center.rows[0].log_ratio <= center.rows[0].hi);

    const auto swing = rcifs::fluctuation_demo(sys, env, {-8, 8}, 200);
    CHECK(swing.violations == 0);
    REQUIRE(swing.rows.size() == 2);
    CHECK(swing.log_spread > 0.5);

    CHECK(error_code([&] { rcifs::fluctuation_demo(sys, env, {60}, 50); }) == "n_cap_too_small");
    const rcifs::System mixed = full_shift({0.5, 1.0 / 3.0});
    CHECK(error_code([&] { rcifs::fluctuation_demo(mixed, env, {0}, 100); }) == "ratios_not_equal");
    const rcifs::Environment env3 =
        rcifs::validate_environment({{0.2, 1.0 / 7.0, 0.5}, {0.3, 0.3, 0.4}, 1e-9});
    CHECK(error_code([&] { rcifs::fluctuation_demo(sys, env3, {0}, 100); }) == "not_two_values");
}

TEST_CASE("counting queries fail loudly when their inputs cannot reach") {
    const rcifs::System sys = full_shift({1.0 / 3.0, 1.0 / 3.0});
    const rcifs::Environment env = two_values(0.2, 1.0 / 7.0);

    const rcifs::EnvironmentPath stub = rcifs::sample_iid(env, 1, 3);
    rcifs::CountingContext<rcifs::ExactOps> deep(sys, 20.0, &stub);
    CHECK(error_code([&] { deep.count(rcifs::Threshold::raw(20.0), &stub); }) == "path_too_short");

    rcifs::CountingContext<rcifs::ExactOps> shallow(sys, 5.0, nullptr);
    CHECK(error_code([&] { shallow.count(rcifs::Threshold::raw(20.0), nullptr); }) ==
          "table_too_small");
    CHECK(shallow.count(rcifs::Threshold::raw(-1.0), nullptr) == 0);

    // Anchored queries insist on the standard letter weights.
    rcifs::WeightedView<rcifs::ExactOps> shifted(shallow.table(), {1.0, 1.25});
    const rcifs::Threshold anchored = rcifs::Threshold::anchored(sys, {1, 0}, nullptr, 0);
    CHECK(error_code([&] { rcifs::count_below(shifted, anchored, nullptr); }) == "internal_error");

    CHECK(rcifs::rows_needed(10.0, 2.5) == 6);
    CHECK(rcifs::rows_needed(-1.0, 2.5) == 0);
    CHECK(error_code([&] { rcifs::rows_needed(10.0, 0.0); }) == "internal_error");
}
