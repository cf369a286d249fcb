#include "rcifs/composition_table.hpp"

#include <algorithm>
#include <numeric>

namespace rcifs {

namespace {

// Index of composition (k0, k1, rest) within the canonical row-n ordering.
// a=2: index = k0. a=3: k0-major, then k1; row n has (n+1)(n+2)/2 entries.
inline std::size_t comp_index3(int n, std::int64_t k0, std::int64_t k1) {
    const std::size_t u0 = static_cast<std::size_t>(k0);
    return u0 * (static_cast<std::size_t>(n) + 1) - u0 * (u0 - 1) / 2 + static_cast<std::size_t>(k1);
}

} // namespace

template <class Ops>
CompositionTable<Ops>::CompositionTable(const System& sys, int n_max) : sys_(&sys), a_(sys.letters()), n_max_(n_max) {
    if (a_ > 3) {
        fail("alphabet_too_large",
             "composition census supports at most 3 letters, got " + std::to_string(a_));
    }
    const int cap = a_ == 2 ? 20000 : 800;
    if (n_max < 1 || n_max > cap) {
        fail("n_max_exceeded", "n_max " + std::to_string(n_max) + " outside [1," + std::to_string(cap) +
                                   "] for a " + std::to_string(a_) + "-letter alphabet");
    }

    const bool keep_detail = n_max <= 64;
    rows_.resize(static_cast<std::size_t>(n_max));
    if (keep_detail) detail_.resize(static_cast<std::size_t>(n_max));

    // d[ci * a + e] = words of the current length with composition ci ending
    // in letter e; only the previous layer is needed to extend, so full
    // per-letter detail is transient unless kept for tests.
    std::vector<Value> d(comp_count(1) * static_cast<std::size_t>(a_), Ops::zero());
    for (int e = 0; e < a_; ++e) {
        // composition = unit vector at e
        const std::size_t ci = a_ == 2 ? static_cast<std::size_t>(e == 0 ? 1 : 0)
                                       : comp_index3(1, e == 0 ? 1 : 0, e == 1 ? 1 : 0);
        d[ci * static_cast<std::size_t>(a_) + static_cast<std::size_t>(e)] = Ops::one();
    }

    for (int n = 1; n <= n_max; ++n) {
        const std::size_t width = comp_count(n);
        auto& row = rows_[static_cast<std::size_t>(n) - 1];
        row.assign(width, Ops::zero());
        for (std::size_t ci = 0; ci < width; ++ci) {
            for (int e = 0; e < a_; ++e) {
                const Value& v = d[ci * static_cast<std::size_t>(a_) + static_cast<std::size_t>(e)];
                if (Ops::is_zero(v)) continue;
                if (sys.may_precede_suffix(e)) Ops::accumulate(row[ci], v);
            }
        }
        if (keep_detail) detail_[static_cast<std::size_t>(n) - 1] = d;
        if (n == n_max) break;

        // Extend to length n+1: append letter e2 to words ending in e.
        std::vector<Value> next(comp_count(n + 1) * static_cast<std::size_t>(a_), Ops::zero());
        if (a_ == 2) {
            for (std::int64_t k0 = 0; k0 <= n; ++k0) {
                const std::size_t ci = static_cast<std::size_t>(k0);
                for (int e = 0; e < a_; ++e) {
                    const Value& v = d[ci * 2 + static_cast<std::size_t>(e)];
                    if (Ops::is_zero(v)) continue;
                    if (sys.edge(e, 0)) Ops::accumulate(next[static_cast<std::size_t>(k0 + 1) * 2 + 0], v);
                    if (sys.edge(e, 1)) Ops::accumulate(next[static_cast<std::size_t>(k0) * 2 + 1], v);
                }
            }
        } else {
            for (std::int64_t k0 = 0, ci = 0; k0 <= n; ++k0) {
                for (std::int64_t k1 = 0; k1 <= n - k0; ++k1, ++ci) {
                    for (int e = 0; e < a_; ++e) {
                        const Value& v = d[static_cast<std::size_t>(ci) * 3 + static_cast<std::size_t>(e)];
                        if (Ops::is_zero(v)) continue;
                        if (sys.edge(e, 0)) {
                            Ops::accumulate(next[comp_index3(n + 1, k0 + 1, k1) * 3 + 0], v);
                        }
                        if (sys.edge(e, 1)) {
                            Ops::accumulate(next[comp_index3(n + 1, k0, k1 + 1) * 3 + 1], v);
                        }
                        if (sys.edge(e, 2)) {
                            Ops::accumulate(next[comp_index3(n + 1, k0, k1) * 3 + 2], v);
                        }
                    }
                }
            }
        }
        d.swap(next);
    }
}

template <class Ops>
void CompositionTable<Ops>::composition(int n, std::size_t ci, std::int64_t* kappa) const {
    if (a_ == 2) {
        kappa[0] = static_cast<std::int64_t>(ci);
        kappa[1] = static_cast<std::int64_t>(n) - kappa[0];
        return;
    }
    // Invert the k0-major layout by walking k0 blocks.
    std::size_t remaining = ci;
    std::int64_t k0 = 0;
    std::size_t block = static_cast<std::size_t>(n) + 1;
    while (remaining >= block) {
        remaining -= block;
        --block;
        ++k0;
    }
    kappa[0] = k0;
    kappa[1] = static_cast<std::int64_t>(remaining);
    kappa[2] = static_cast<std::int64_t>(n) - kappa[0] - kappa[1];
}

template class CompositionTable<ExactOps>;
template class CompositionTable<LogOps>;

template <class Ops>
WeightedView<Ops>::WeightedView(const CompositionTable<Ops>& table, std::vector<double> letter_weights)
    : table_(&table), weights_(std::move(letter_weights)) {
    const System& sys = table.system();
    const int a = sys.letters();
    if (weights_.empty()) {
        weights_.resize(static_cast<std::size_t>(a));
        for (int e = 0; e < a; ++e) weights_[static_cast<std::size_t>(e)] = sys.letter_weight(e);
        standard_ = true;
    } else {
        if (static_cast<int>(weights_.size()) != a) {
            fail("internal_error", "weight vector length mismatch");
        }
        standard_ = true;
        for (int e = 0; e < a; ++e) {
            if (weights_[static_cast<std::size_t>(e)] != sys.letter_weight(e)) standard_ = false;
        }
    }
    for (double w : weights_) {
        if (!(w > 0.0)) fail("ratio_out_of_range", "letter weight " + std::to_string(w) + " must be positive");
    }
    min_weight_ = *std::min_element(weights_.begin(), weights_.end());
    max_weight_ = *std::max_element(weights_.begin(), weights_.end());

    rows_.resize(static_cast<std::size_t>(table.n_max()));
    std::vector<std::int64_t> kappa(static_cast<std::size_t>(a));
    for (int n = 1; n <= table.n_max(); ++n) {
        const std::size_t width = table.comp_count(n);
        auto& row = rows_[static_cast<std::size_t>(n) - 1];
        std::vector<double> raw(width);
        for (std::size_t ci = 0; ci < width; ++ci) {
            table.composition(n, ci, kappa.data());
            double w = 0.0;
            for (int e = 0; e < a; ++e) {
                w += static_cast<double>(kappa[static_cast<std::size_t>(e)]) * weights_[static_cast<std::size_t>(e)];
            }
            raw[ci] = w;
        }
        std::vector<std::uint32_t> order(width);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(),
                  [&](std::uint32_t x, std::uint32_t y) { return raw[x] < raw[y]; });
        row.weight.resize(width);
        row.comp.resize(width);
        row.prefix.resize(width);
        Value acc = Ops::zero();
        for (std::size_t r = 0; r < width; ++r) {
            row.weight[r] = raw[order[r]];
            row.comp[r] = order[r];
            Ops::accumulate(acc, table.suffix_count(n, order[r]));
            row.prefix[r] = acc;
        }
    }
}

template <class Ops>
typename Ops::Value WeightedView<Ops>::row_count_at_most(int n, double cutoff) const {
    const Row& r = row(n);
    const auto it = std::upper_bound(r.weight.begin(), r.weight.end(), cutoff);
    if (it == r.weight.begin()) return Ops::zero();
    const std::size_t rank = static_cast<std::size_t>(it - r.weight.begin()) - 1;
    return r.prefix[rank];
}

template class WeightedView<ExactOps>;
template class WeightedView<LogOps>;

} // namespace rcifs
