#ifndef RCIFS_COMPOSITION_TABLE_HPP
#define RCIFS_COMPOSITION_TABLE_HPP

// The counting engine's census: for each word length n and letter
// composition kappa (how many times each letter occurs), the number of
// admissible words with that composition whose last letter may precede the
// suffix. For affine systems the ergodic sum depends only on kappa, so this
// table collapses exponentially many words into O(n) states for a 2-letter
// alphabet and O(n^2) for 3 letters.
//
// Two interchangeable value backends:
//   ExactOps  — arbitrary-precision integers, exact;
//   LogOps    — natural logs of the counts in double, with a certified
//               relative error bound that grows linearly in n_max.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rcifs/bigint.hpp"
#include "rcifs/errors.hpp"
#include "rcifs/system.hpp"

namespace rcifs {

struct ExactOps {
    using Value = BigInt;
    static Value zero() { return Value(0); }
    static Value one() { return Value(1); }
    static bool is_zero(const Value& v) { return v.is_zero(); }
    static void accumulate(Value& into, const Value& v) { into += v; }
    static double to_log(const Value& v) {
        return v.is_zero() ? -std::numeric_limits<double>::infinity() : log_big(v);
    }
    static std::string to_text(const Value& v) { return decimal(v); }
    // Per-table-build certified relative error of to_log vs the true count.
    static double certified_relative_error(int) { return 0.0; }
};

struct LogOps {
    using Value = double; // natural log of the count; -inf encodes 0
    static Value zero() { return -std::numeric_limits<double>::infinity(); }
    static Value one() { return 0.0; }
    static bool is_zero(const Value& v) { return v == -std::numeric_limits<double>::infinity(); }
    static void accumulate(Value& into, const Value& v) {
        if (is_zero(v)) return;
        if (is_zero(into)) {
            into = v;
            return;
        }
        const double hi = into > v ? into : v;
        const double lo = into > v ? v : into;
        into = hi + std::log1p(std::exp(lo - hi));
    }
    static double to_log(const Value& v) { return v; }
    static std::string to_text(const Value&) { return std::string(); }
    // Each table value is produced by a chain of at most n_max log-sum-exp
    // steps (absolute log error a few eps each) plus a prefix accumulation
    // over a row of width <= n_max+1. The bound below is a deliberate
    // overestimate of that budget; for n_max = 5000 it is ~9e-12.
    static double certified_relative_error(int n_max) {
        return (8.0 * n_max + 64.0 * std::log2(static_cast<double>(n_max) + 2.0)) *
               std::numeric_limits<double>::epsilon();
    }
};

template <class Ops>
class CompositionTable {
public:
    using Value = typename Ops::Value;

    // Errors: alphabet_too_large (a > 3); n_max_exceeded (a=2 cap 20000,
    // a=3 cap 800).
    CompositionTable(const System& sys, int n_max);

    const System& system() const { return *sys_; }
    int n_max() const { return n_max_; }
    int letters() const { return a_; }

    // Number of compositions in row n (n in 1..n_max).
    std::size_t comp_count(int n) const {
        return a_ == 2 ? static_cast<std::size_t>(n) + 1
                       : (static_cast<std::size_t>(n) + 1) * (static_cast<std::size_t>(n) + 2) / 2;
    }

    // Suffix-compatible word count for composition index ci of row n.
    const Value& suffix_count(int n, std::size_t ci) const {
        return rows_[static_cast<std::size_t>(n) - 1][ci];
    }
    const std::vector<Value>& suffix_row(int n) const { return rows_[static_cast<std::size_t>(n) - 1]; }

    // Writes the composition (multiplicity per letter) of index ci in row n.
    void composition(int n, std::size_t ci, std::int64_t* kappa) const;

    // Per-last-letter detail rows, retained only for small tables
    // (n_max <= 64) where tests spot-check the census recurrence.
    // last_letter(n, ci, e) = admissible words, composition ci, ending in e.
    bool has_detail() const { return !detail_.empty(); }
    const Value& last_letter(int n, std::size_t ci, int e) const {
        return detail_[static_cast<std::size_t>(n) - 1][ci * static_cast<std::size_t>(a_) + static_cast<std::size_t>(e)];
    }

private:
    const System* sys_;
    int a_ = 0;
    int n_max_ = 0;
    std::vector<std::vector<Value>> rows_;    // [n-1][ci] -> suffix count
    std::vector<std::vector<Value>> detail_;  // retained when n_max <= 64
};

extern template class CompositionTable<ExactOps>;
extern template class CompositionTable<LogOps>;

// A read-only weighted lens over a table: per row, compositions sorted by
// their floating weight sum_e kappa_e * weight_e, with prefix sums of the
// suffix counts in that order. Counting queries against any cutoff then
// reduce to one binary search per row. The weights default to the system's
// letter weights -log alpha_e; the sandwich check supplies shifted ones.
template <class Ops>
class WeightedView {
public:
    using Value = typename Ops::Value;

    WeightedView(const CompositionTable<Ops>& table, std::vector<double> letter_weights);

    const CompositionTable<Ops>& table() const { return *table_; }
    const std::vector<double>& letter_weights() const { return weights_; }
    double min_letter_weight() const { return min_weight_; }
    double max_letter_weight() const { return max_weight_; }
    bool standard_weights() const { return standard_; }

    struct Row {
        std::vector<double> weight;       // ascending
        std::vector<std::uint32_t> comp;  // composition index at each rank
        std::vector<Value> prefix;        // prefix[r] = sum of suffix counts through rank r
    };

    const Row& row(int n) const { return rows_[static_cast<std::size_t>(n) - 1]; }

    // Count (as a backend value) of row-n words with weight <= cutoff under
    // plain floating comparison.
    Value row_count_at_most(int n, double cutoff) const;

private:
    const CompositionTable<Ops>* table_;
    std::vector<double> weights_;
    double min_weight_ = 0.0;
    double max_weight_ = 0.0;
    bool standard_ = false;
    std::vector<Row> rows_;
};

extern template class WeightedView<ExactOps>;
extern template class WeightedView<LogOps>;

} // namespace rcifs

#endif
