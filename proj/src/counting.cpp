#include "rcifs/counting.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "rcifs/errors.hpp"
#include "rcifs/transfer.hpp"
#include "rcifs/weight_lattice.hpp"

namespace rcifs {

Threshold Threshold::raw(double t) {
    Threshold thr;
    thr.anchored_ = false;
    thr.value_ = t;
    return thr;
}

Threshold Threshold::anchored(const System& sys, std::vector<std::int64_t> kappa,
                              const EnvironmentPath* path, std::size_t n_env) {
    if (static_cast<int>(kappa.size()) != sys.letters()) {
        fail("internal_error", "anchored threshold needs one multiplicity per letter");
    }
    Threshold thr;
    thr.anchored_ = true;
    thr.kappa_ = std::move(kappa);
    double value = 0.0;
    for (int e = 0; e < sys.letters(); ++e) {
        value += static_cast<double>(thr.kappa_[static_cast<std::size_t>(e)]) * sys.letter_weight(e);
    }
    if (path != nullptr) {
        if (n_env > path->length()) {
            fail("path_too_short", "anchor position " + std::to_string(n_env) + " beyond path length " +
                                       std::to_string(path->length()));
        }
        thr.env_counts_.resize(static_cast<std::size_t>(path->value_count()));
        for (int i = 0; i < path->value_count(); ++i) {
            thr.env_counts_[static_cast<std::size_t>(i)] = path->count(i, n_env);
        }
        thr.anchor_path_ = path;
        value -= path->cum_log(n_env);
    }
    thr.value_ = value;
    return thr;
}

int rows_needed(double t_max, double step_min) {
    if (!(step_min > 0.0)) fail("internal_error", "per-step weight floor must be positive");
    if (t_max < 0.0) return 0;
    return static_cast<int>(std::floor(t_max / step_min)) + 2;
}

namespace {

// Minimum over the path's values of -log|z_i| (0 when some modulus is 1);
// together with the smallest letter weight this floors the per-step weight.
double min_neg_log_value(const EnvironmentPath& path) {
    double best = 1e300;
    for (int i = 0; i < path.value_count(); ++i) best = std::min(best, -path.log_value(i));
    return best;
}

} // namespace

template <class Ops>
typename Ops::Value count_below(const WeightedView<Ops>& view, const Threshold& threshold,
                                const EnvironmentPath* path) {
    const System& sys = view.table().system();
    const double tval = threshold.value();
    typename Ops::Value total = Ops::zero();
    if (!(tval >= 0.0)) return total; // every word weight is positive

    const double step_min = view.min_letter_weight() + (path ? min_neg_log_value(*path) : 0.0);
    const int n_need = rows_needed(tval, step_min);
    if (path != nullptr && path->length() < static_cast<std::size_t>(n_need)) {
        fail("path_too_short", "threshold " + std::to_string(tval) + " reaches length " +
                                   std::to_string(n_need) + " but the path has " +
                                   std::to_string(path->length()) + " steps");
    }
    if (view.table().n_max() < n_need) {
        fail("table_too_small", "threshold " + std::to_string(tval) + " reaches length " +
                                    std::to_string(n_need) + " but the table holds " +
                                    std::to_string(view.table().n_max()) + " rows");
    }
    if (threshold.is_anchored() && !view.standard_weights()) {
        fail("internal_error", "anchored thresholds require the standard letter weights");
    }
    if (threshold.anchor_path() != nullptr && path != nullptr && threshold.anchor_path() != path) {
        fail("internal_error", "threshold anchored to a different path than the query's");
    }

    const int a = sys.letters();
    std::optional<WeightLattice> lattice;
    std::vector<std::int64_t> kappa(static_cast<std::size_t>(a));
    std::vector<std::int64_t> coeff;
    if (threshold.is_anchored()) {
        lattice.emplace(sys, path);
        coeff.resize(static_cast<std::size_t>(lattice->slots()));
    }

    for (int n = 1; n <= n_need; ++n) {
        const double lam = path ? path->cum_log(static_cast<std::size_t>(n)) : 0.0;
        const double cutoff = tval + lam;
        const auto& row = view.row(n);
        if (!threshold.is_anchored()) {
            // Raw threshold: closed floating comparison, one binary search.
            if (row.weight.front() > cutoff) continue;
            Ops::accumulate(total, view.row_count_at_most(n, cutoff));
            continue;
        }

        // Anchored threshold: split the row into definitely-in / band /
        // definitely-out by a conservative float envelope, then decide the
        // band members exactly in the integer lattice.
        const double band = 1e-12 * (2.0 + std::fabs(tval) +
                                     static_cast<double>(n) * view.max_letter_weight() + std::fabs(lam));
        const auto lo_it = std::upper_bound(row.weight.begin(), row.weight.end(), cutoff - band);
        const auto hi_it = std::upper_bound(row.weight.begin(), row.weight.end(), cutoff + band);
        const std::size_t lo_rank = static_cast<std::size_t>(lo_it - row.weight.begin());
        const std::size_t hi_rank = static_cast<std::size_t>(hi_it - row.weight.begin());
        if (lo_rank > 0) Ops::accumulate(total, row.prefix[lo_rank - 1]);
        for (std::size_t r = lo_rank; r < hi_rank; ++r) {
            const auto& candidate = view.table().suffix_count(n, row.comp[r]);
            if (Ops::is_zero(candidate)) continue;
            view.table().composition(n, row.comp[r], kappa.data());
            std::fill(coeff.begin(), coeff.end(), 0);
            // Sign of (candidate weight - threshold): letters first...
            for (int e = 0; e < a; ++e) {
                const std::int64_t anchor_k =
                    threshold.kappa().empty() ? 0 : threshold.kappa()[static_cast<std::size_t>(e)];
                coeff[static_cast<std::size_t>(lattice->letter_slot(e))] +=
                    kappa[static_cast<std::size_t>(e)] - anchor_k;
            }
            // ...then environment contributions: the candidate row carries
            // -Lambda_n = sum_i s_{n,i} * (-log z_i), the anchor -Lambda_{n'}.
            if (path != nullptr) {
                for (int i = 0; i < path->value_count(); ++i) {
                    coeff[static_cast<std::size_t>(lattice->value_slot(i))] +=
                        path->count(i, static_cast<std::size_t>(n));
                }
            }
            if (!threshold.env_counts().empty()) {
                const EnvironmentPath* anchor = threshold.anchor_path();
                for (int i = 0; i < anchor->value_count(); ++i) {
                    coeff[static_cast<std::size_t>(lattice->value_slot(i))] -=
                        threshold.env_counts()[static_cast<std::size_t>(i)];
                }
            }
            if (lattice->sign(coeff) <= 0) Ops::accumulate(total, candidate);
        }
    }
    return total;
}

template ExactOps::Value count_below<ExactOps>(const WeightedView<ExactOps>&, const Threshold&,
                                               const EnvironmentPath*);
template LogOps::Value count_below<LogOps>(const WeightedView<LogOps>&, const Threshold&,
                                           const EnvironmentPath*);

template <class Ops>
CountingContext<Ops>::CountingContext(const System& sys, double t_max, const EnvironmentPath* path)
    : table_(sys, std::max(1, rows_needed(t_max, [&] {
                  double step = 1e300;
                  for (int e = 0; e < sys.letters(); ++e) step = std::min(step, sys.letter_weight(e));
                  return step + (path ? min_neg_log_value(*path) : 0.0);
              }()))),
      view_(table_, {}) {}

template class CountingContext<ExactOps>;
template class CountingContext<LogOps>;

template <class Ops>
CountingSeries counting_series(const System& sys, const EnvironmentPath* path,
                               const std::vector<double>& grid, double exponent) {
    if (grid.empty()) fail("internal_error", "threshold grid is empty");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] <= grid[i + 1])) fail("internal_error", "threshold grid must ascend");
    }
    CountingContext<Ops> ctx(sys, grid.back(), path);
    CountingSeries out;
    out.exact = std::is_same_v<Ops, ExactOps>;
    out.exponent = exponent;
    out.certified_rel_error = Ops::certified_relative_error(ctx.table().n_max());
    out.grid = grid;
    out.count_text.reserve(grid.size());
    out.log_count.reserve(grid.size());
    out.log_ratio.reserve(grid.size());
    for (double t : grid) {
        const auto n = ctx.count(Threshold::raw(t), path);
        const double log_n = Ops::to_log(n);
        out.count_text.push_back(Ops::to_text(n));
        out.log_count.push_back(log_n);
        out.log_ratio.push_back(log_n - exponent * t);
    }
    return out;
}

template CountingSeries counting_series<ExactOps>(const System&, const EnvironmentPath*,
                                                  const std::vector<double>&, double);
template CountingSeries counting_series<LogOps>(const System&, const EnvironmentPath*,
                                                const std::vector<double>&, double);

SandwichReport sandwich_check(const System& sys, const EnvironmentPath& path,
                              const std::vector<double>& grid) {
    if (!path.certificate()) {
        fail("certificate_missing", "sandwich bounds need a bounded-fluctuation certificate");
    }
    const PathCertificate& cert = *path.certificate();
    SandwichReport report;
    report.cert_lo = cert.lo;
    report.cert_hi = cert.hi;
    for (int i = 0; i < path.value_count(); ++i) {
        report.c += cert.frequencies[static_cast<std::size_t>(i)] * path.log_value(i);
        report.d += path.log_value(i);
    }

    // Shifted letter weights -log alpha_e - c; positive since c <= 0... and
    // guarded anyway because certificates with c = 0 keep them equal to the
    // standard weights.
    std::vector<double> shifted(static_cast<std::size_t>(sys.letters()));
    for (int e = 0; e < sys.letters(); ++e) {
        shifted[static_cast<std::size_t>(e)] = sys.letter_weight(e) - report.c;
        if (!(shifted[static_cast<std::size_t>(e)] > 0.0)) {
            fail("ratio_out_of_range", "shifted letter weight must be positive");
        }
    }

    double t_max = 0.0;
    for (double t : grid) t_max = std::max(t_max, t);
    // The upper side evaluates at T + lo*d >= T (both factors <= 0).
    const double t_shift_max = t_max + cert.lo * report.d;
    const double step_std = [&] {
        double s = 1e300;
        for (int e = 0; e < sys.letters(); ++e) s = std::min(s, sys.letter_weight(e));
        return s + min_neg_log_value(path);
    }();
    const double step_shift = *std::min_element(shifted.begin(), shifted.end());
    const int rows = std::max(rows_needed(t_max, step_std), rows_needed(t_shift_max, step_shift));

    CompositionTable<ExactOps> table(sys, std::max(1, rows));
    WeightedView<ExactOps> view_std(table, {});
    WeightedView<ExactOps> view_shift(table, shifted);

    for (double t : grid) {
        SandwichReport::Row row;
        row.t = t;
        row.lower = count_below(view_shift, Threshold::raw(t + cert.hi * report.d), nullptr);
        row.mid = count_below(view_std, Threshold::raw(t), &path);
        row.upper = count_below(view_shift, Threshold::raw(t + cert.lo * report.d), nullptr);
        row.ok = row.lower <= row.mid && row.mid <= row.upper;
        if (!row.ok) ++report.violations;
        report.rows.push_back(std::move(row));
    }
    return report;
}

ReductionReport reduction_identity_check(const System& sys, const EnvironmentPath& path,
                                         const std::vector<int>& n_list) {
    if (!sys.equal_ratios()) {
        fail("ratios_not_equal", "the reduction identity requires equal contraction ratios");
    }
    ReductionReport report;
    if (n_list.empty()) return report;

    const double w = sys.letter_weight(0);
    int max_n = 0;
    double t_max = 0.0;
    for (int n : n_list) {
        if (n < 1) fail("internal_error", "reduction lengths must be >= 1");
        max_n = std::max(max_n, n);
        t_max = std::max(t_max, static_cast<double>(n) * w - path.cum_log(static_cast<std::size_t>(n)));
    }
    const int rows = rows_needed(t_max, w); // deterministic side reaches deepest
    CompositionTable<ExactOps> table(sys, std::max(1, rows));
    WeightedView<ExactOps> view(table, {});

    std::vector<std::int64_t> kappa(static_cast<std::size_t>(sys.letters()), 0);
    for (int n : n_list) {
        kappa.assign(kappa.size(), 0);
        kappa[0] = n;
        const Threshold random_thr = Threshold::anchored(sys, kappa, &path, static_cast<std::size_t>(n));
        const Threshold det_thr = Threshold::anchored(sys, kappa, nullptr, 0);
        const BigInt lhs = count_below(view, random_thr, &path);
        const BigInt rhs = count_below(view, det_thr, nullptr);
        ++report.checked;
        if (lhs != rhs) {
            ++report.violations;
            report.failed_n.push_back(n);
        }
    }
    return report;
}

CrossingBracketReport crossing_bracket_check(const System& sys, const EnvironmentPath& path,
                                             double p, long m,
                                             const std::vector<std::size_t>& crossing_ns) {
    if (!sys.equal_ratios()) {
        fail("ratios_not_equal", "the crossing bracket requires equal contraction ratios");
    }
    if (path.value_count() != 2) {
        fail("not_two_values", "the crossing bracket requires a two-value environment");
    }
    const double log_alpha = sys.log_ratio(0);
    const double log_z = path.log_value(0);
    const double log_w = path.log_value(1);
    const double q = 1.0 - p;

    CrossingBracketReport report;
    for (std::size_t n : crossing_ns) {
        if (n > path.length()) fail("path_too_short", "crossing time beyond path length");
        const double nd = static_cast<double>(n);
        const double md = static_cast<double>(m);
        const double realized = nd * log_alpha + path.cum_log(n);
        const double lower = nd * log_alpha + (p * nd + md) * log_z + (q * nd - md + 1.0) * log_w;
        const double upper = nd * log_alpha + (p * nd + md - 1.0) * log_z + (q * nd - md) * log_w;
        const double tol = 1e-9 * std::max(1.0, nd);
        CrossingBracketReport::Row row;
        row.n = n;
        row.lower = lower;
        row.value = realized;
        row.upper = upper;
        row.ok = lower <= realized + tol && realized <= upper + tol;
        ++report.checked;
        if (!row.ok) ++report.violations;
        report.rows.push_back(row);
    }
    return report;
}

FluctuationReport fluctuation_demo(const System& sys, const Environment& env,
                                   const std::vector<long>& m_targets, int n_cap,
                                   double calib_lo, double calib_hi) {
    if (!sys.equal_ratios()) {
        fail("ratios_not_equal", "the fluctuation demo requires equal contraction ratios");
    }
    if (env.value_count() != 2) {
        fail("not_two_values", "the fluctuation demo requires a two-value environment");
    }
    const double w_letter = sys.letter_weight(0);
    const double p = env.probability(0);
    const double log_z = env.log_value(0);
    const double log_w = env.log_value(1);

    FluctuationReport report;
    report.delta = delta(sys);
    report.delta_lambda = delta_lambda(sys, env);

    // Choose, per m, the anchor length n and the target count S = floor(pn)+m.
    // Prefer the largest n <= n_cap at which p*n is integral (the walk then
    // sits exactly on the frequency line); fall back to the largest feasible n.
    struct Target {
        long m;
        int n = 0;
        std::int64_t s = 0;
    };
    std::vector<Target> targets;
    for (long m : m_targets) {
        Target best;
        best.m = m;
        for (int n = n_cap; n >= 1; --n) {
            const double pn = p * static_cast<double>(n);
            const std::int64_t s = static_cast<std::int64_t>(std::floor(pn + 1e-9)) + m;
            if (s < 0 || s > n) continue;
            if (best.n == 0) {
                best.n = n;
                best.s = s;
            }
            if (std::fabs(pn - std::round(pn)) <= 1e-9) {
                best.n = n;
                best.s = s;
                break;
            }
        }
        if (best.n == 0) {
            fail("n_cap_too_small", "no length up to " + std::to_string(n_cap) +
                                        " realizes the requested offset m = " + std::to_string(m));
        }
        targets.push_back(best);
    }

    // Build each target's path: an integer ramp hits s_{n} = S exactly, then
    // the greedy balanced rule continues at frequency (p, 1-p) long enough
    // for the anchored threshold's count query.
    const double step_min = w_letter + std::min(-log_z, -log_w);
    int rows = 1;
    struct Prepared {
        Target target;
        EnvironmentPath path;
        double t_hat;
    };
    std::vector<Prepared> prepared;
    for (const Target& target : targets) {
        const double lambda_n = static_cast<double>(target.s) * log_z +
                                static_cast<double>(target.n - target.s) * log_w;
        const double t_hat = static_cast<double>(target.n) * w_letter - lambda_n;
        const int need = rows_needed(t_hat, step_min);
        rows = std::max(rows, need);

        std::vector<int> indices;
        const std::size_t total_len = static_cast<std::size_t>(std::max(need, target.n)) + 1;
        indices.reserve(total_len);
        std::int64_t s0 = 0, s1 = 0;
        for (int k = 0; k < target.n; ++k) {
            // Ramp: value 0 appears exactly when floor(S(k+1)/n) increments.
            const std::int64_t next = (target.s * static_cast<std::int64_t>(k + 1)) /
                                      static_cast<std::int64_t>(target.n);
            if (next > s0) {
                indices.push_back(0);
                ++s0;
            } else {
                indices.push_back(1);
                ++s1;
            }
        }
        while (indices.size() < total_len) {
            const double k1 = static_cast<double>(indices.size()) + 1.0;
            const double score0 = k1 * p - static_cast<double>(s0);
            const double score1 = k1 * (1.0 - p) - static_cast<double>(s1);
            if (score0 >= score1) {
                indices.push_back(0);
                ++s0;
            } else {
                indices.push_back(1);
                ++s1;
            }
        }
        prepared.push_back(Prepared{target, EnvironmentPath(env, std::move(indices), std::nullopt), t_hat});
    }

    CompositionTable<LogOps> table(sys, std::max(rows, rows_needed(calib_hi, w_letter)));
    WeightedView<LogOps> view(table, {});
    report.certified_rel_error = LogOps::certified_relative_error(table.n_max());

    // Calibration: deterministic log-ratios on the anchored lattice
    // T = n * w_letter inside [calib_lo, calib_hi] — the same thresholds the
    // reduction identity maps the random counts onto.
    std::vector<std::int64_t> kappa(static_cast<std::size_t>(sys.letters()), 0);
    double c_meas = 1e300, d_meas = -1e300;
    const int calib_first = std::max(1, static_cast<int>(std::ceil(calib_lo / w_letter)));
    const int calib_last = static_cast<int>(std::floor(calib_hi / w_letter));
    if (calib_last < calib_first) fail("internal_error", "empty calibration window");
    for (int n = calib_first; n <= calib_last; ++n) {
        kappa.assign(kappa.size(), 0);
        kappa[0] = n;
        const Threshold thr = Threshold::anchored(sys, kappa, nullptr, 0);
        const double log_count = count_below(view, thr, nullptr);
        const double lr = log_count - report.delta * thr.value();
        c_meas = std::min(c_meas, lr);
        d_meas = std::max(d_meas, lr);
    }
    report.log_c_meas = c_meas;
    report.log_d_meas = d_meas;

    double lr_min = 1e300, lr_max = -1e300;
    for (const Prepared& item : prepared) {
        kappa.assign(kappa.size(), 0);
        kappa[0] = item.target.n;
        const Threshold thr =
            Threshold::anchored(sys, kappa, &item.path, static_cast<std::size_t>(item.target.n));
        const double log_count = count_below(view, thr, &item.path);
        FluctuationReport::Row row;
        row.m = item.target.m;
        row.n = static_cast<std::size_t>(item.target.n);
        row.t = thr.value();
        row.log_count = log_count;
        row.log_ratio = log_count - report.delta_lambda * thr.value();
        const double center = report.delta_lambda * static_cast<double>(item.target.m) * (log_z - log_w);
        row.lo = c_meas + report.delta_lambda * log_w + center;
        row.hi = d_meas - report.delta_lambda * log_z + center;
        row.ok = row.log_ratio >= row.lo - 1e-6 && row.log_ratio <= row.hi + 1e-6;
        if (!row.ok) ++report.violations;
        lr_min = std::min(lr_min, row.log_ratio);
        lr_max = std::max(lr_max, row.log_ratio);
        report.rows.push_back(row);
    }
    report.log_spread = report.rows.empty() ? 0.0 : lr_max - lr_min;
    return report;
}

} // namespace rcifs
