#ifndef RCIFS_COUNTING_HPP
#define RCIFS_COUNTING_HPP

// Counting queries over the composition census: how many admissible words
// (of any length) have total weight at most T, deterministically or along a
// realized environment path — plus the finite-scale consistency checks built
// on those counts (sandwich bounds, the reduction identity, crossing-time
// brackets, and the anchored-threshold fluctuation demonstration).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcifs/bigint.hpp"
#include "rcifs/composition_table.hpp"
#include "rcifs/environment.hpp"
#include "rcifs/system.hpp"

namespace rcifs {

// A counting cutoff. Raw thresholds are plain reals compared in floating
// arithmetic (closed inequality, documented semantics). Anchored thresholds
// remember the integer data that generated them — a letter composition and
// an environment prefix — so queries can resolve ties exactly in the
// integer lattice instead of trusting the float image.
class Threshold {
public:
    static Threshold raw(double t);

    // T = sum_e kappa_e * (-log alpha_e) - Lambda_{n_env} (the path part is
    // omitted when path is null). kappa must have one entry per letter.
    static Threshold anchored(const System& sys, std::vector<std::int64_t> kappa,
                              const EnvironmentPath* path, std::size_t n_env);

    bool is_anchored() const { return anchored_; }
    double value() const { return value_; }
    const std::vector<std::int64_t>& kappa() const { return kappa_; }
    const std::vector<std::int64_t>& env_counts() const { return env_counts_; }
    const EnvironmentPath* anchor_path() const { return anchor_path_; }

private:
    bool anchored_ = false;
    double value_ = 0.0;
    std::vector<std::int64_t> kappa_;      // empty for raw
    std::vector<std::int64_t> env_counts_; // empty for raw or path-free anchors
    const EnvironmentPath* anchor_path_ = nullptr;
};

// Core query: backend-valued count of words with weight <= threshold.
// Deterministic when path is null; otherwise each length-n row is offset by
// the realized Lambda_n. Raw thresholds use one binary search per row;
// anchored thresholds add an exact lattice decision for every composition
// whose float weight lands within a conservative error band of the cutoff.
// Errors: path_too_short, table_too_small; anchored queries additionally
// require the view's standard letter weights.
template <class Ops>
typename Ops::Value count_below(const WeightedView<Ops>& view, const Threshold& threshold,
                                const EnvironmentPath* path);

extern template ExactOps::Value count_below<ExactOps>(const WeightedView<ExactOps>&, const Threshold&,
                                                      const EnvironmentPath*);
extern template LogOps::Value count_below<LogOps>(const WeightedView<LogOps>&, const Threshold&,
                                                  const EnvironmentPath*);

// Table + standard-weight view sized for thresholds up to t_max, built in
// one stroke. The census depends only on the system; the path (if given)
// enters via its minimum per-step log-modulus, which shortens the deepest
// row the threshold can reach.
template <class Ops>
class CountingContext {
public:
    CountingContext(const System& sys, double t_max, const EnvironmentPath* path);

    const CompositionTable<Ops>& table() const { return table_; }
    const WeightedView<Ops>& view() const { return view_; }

    typename Ops::Value count(const Threshold& threshold, const EnvironmentPath* path) const {
        return count_below(view_, threshold, path);
    }

private:
    CompositionTable<Ops> table_;
    WeightedView<Ops> view_;
};

extern template class CountingContext<ExactOps>;
extern template class CountingContext<LogOps>;

// Smallest row count sufficient for thresholds up to t_max (plus a safety
// margin row), given the per-step weight floor.
int rows_needed(double t_max, double step_min);

// Evaluated counting series over an ascending threshold grid.
struct CountingSeries {
    bool exact = true;
    double exponent = 0.0;            // the delta* the ratios are taken against
    double certified_rel_error = 0.0; // 0 for the exact backend
    std::vector<double> grid;
    std::vector<std::string> count_text; // decimal counts; empty strings in log mode
    std::vector<double> log_count;       // -inf marks a zero count
    std::vector<double> log_ratio;       // log_count - exponent * T
};

template <class Ops>
CountingSeries counting_series(const System& sys, const EnvironmentPath* path,
                               const std::vector<double>& grid, double exponent);

extern template CountingSeries counting_series<ExactOps>(const System&, const EnvironmentPath*,
                                                         const std::vector<double>&, double);
extern template CountingSeries counting_series<LogOps>(const System&, const EnvironmentPath*,
                                                       const std::vector<double>&, double);

// Two-sided bound check for certified bounded-fluctuation paths: the
// deterministic count under the drift-shifted weights -log alpha_e - c,
// taken at T + hi*d and T + lo*d, must bracket the random count at T.
// All three counts are exact integers. Errors: certificate_missing.
struct SandwichReport {
    double c = 0.0, d = 0.0;
    double cert_lo = 0.0, cert_hi = 0.0;
    std::size_t violations = 0;
    struct Row {
        double t;
        BigInt lower, mid, upper;
        bool ok;
    };
    std::vector<Row> rows;
};

SandwichReport sandwich_check(const System& sys, const EnvironmentPath& path,
                              const std::vector<double>& grid);

// Exact identity for equal-ratio systems: the random count at the anchored
// threshold T_n = n*(-log alpha) - Lambda_n equals the deterministic count
// at n*(-log alpha), as integers, for every n in n_list.
// Errors: ratios_not_equal.
struct ReductionReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::vector<int> failed_n;
};

ReductionReport reduction_identity_check(const System& sys, const EnvironmentPath& path,
                                         const std::vector<int>& n_list);

// Two-sided bound on the realized random ergodic sum at crossing times of
// the value-0 count walk across p*n + m. Bounds are evaluated in floating
// arithmetic with tolerance 1e-9*n; the crossing times themselves come from
// exact integer counts. Errors: ratios_not_equal, not_two_values.
struct CrossingBracketReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    struct Row {
        std::size_t n;
        double lower, value, upper;
        bool ok;
    };
    std::vector<Row> rows; // every checked crossing, ascending in n
};

CrossingBracketReport crossing_bracket_check(const System& sys, const EnvironmentPath& path,
                                             double p, long m,
                                             const std::vector<std::size_t>& crossing_ns);

// Constructs, per requested m, a path whose value-0 count walk hits
// floor(p*n) + m at a controlled n <= n_cap, then measures the random
// count ratio at the anchored threshold against the bracket built from the
// deterministic ratio extrema [C_meas, D_meas] over the calibration window.
// Log-space backend. Errors: ratios_not_equal, not_two_values,
// n_cap_too_small.
struct FluctuationReport {
    double delta = 0.0;
    double delta_lambda = 0.0;
    double log_c_meas = 0.0;
    double log_d_meas = 0.0;
    double certified_rel_error = 0.0;
    std::size_t violations = 0;
    struct Row {
        long m;
        std::size_t n;
        double t;
        double log_count;
        double log_ratio;
        double lo, hi; // bracket in log scale
        bool ok;
    };
    std::vector<Row> rows;
    double log_spread = 0.0; // max log_ratio - min log_ratio across rows
};

FluctuationReport fluctuation_demo(const System& sys, const Environment& env,
                                   const std::vector<long>& m_targets, int n_cap,
                                   double calib_lo = 20.0, double calib_hi = 120.0);

} // namespace rcifs

#endif
