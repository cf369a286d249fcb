#include "rcifs/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcifs/errors.hpp"

namespace rcifs {

Environment validate_environment(const EnvironmentConfig& raw) {
    const int a = static_cast<int>(raw.values.size());
    if (a < 1) fail("bad_frequencies", "environment needs at least one value");
    if (static_cast<int>(raw.probabilities.size()) != a) {
        fail("bad_frequencies", "probabilities has " + std::to_string(raw.probabilities.size()) +
                                    " entries, expected " + std::to_string(a));
    }
    if (!(raw.epsilon > 0.0)) fail("ratio_out_of_range", "epsilon must be positive");
    for (int i = 0; i < a; ++i) {
        const double v = raw.values[i];
        if (!(v > raw.epsilon) || !(v <= 1.0)) {
            fail("ratio_out_of_range", "modulus at index " + std::to_string(i) + " is " + std::to_string(v) +
                                           ", must lie in (epsilon, 1]");
        }
        for (int j = i + 1; j < a; ++j) {
            if (raw.values[j] == v) {
                fail("ratio_out_of_range", "moduli at indices " + std::to_string(i) + " and " +
                                               std::to_string(j) + " coincide; values must be distinct");
            }
        }
    }
    double sum = 0.0;
    for (int i = 0; i < a; ++i) {
        const double p = raw.probabilities[i];
        if (!(p >= 0.0) || !(p <= 1.0)) {
            fail("bad_frequencies", "probability at index " + std::to_string(i) + " is " + std::to_string(p));
        }
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        fail("bad_frequencies", "probabilities must sum to 1, got " + std::to_string(sum));
    }

    Environment env;
    env.values_ = raw.values;
    env.log_values_.resize(raw.values.size());
    double mean = 0.0;
    for (int i = 0; i < a; ++i) {
        env.log_values_[i] = std::log(raw.values[i]);
        mean += raw.probabilities[i] * env.log_values_[i];
    }
    env.probabilities_ = raw.probabilities;
    env.epsilon_ = raw.epsilon;
    env.mean_log_value_ = mean;
    return env;
}

EnvironmentPath::EnvironmentPath(const Environment& env, std::vector<int> indices,
                                 std::optional<PathCertificate> certificate)
    : indices_(std::move(indices)),
      values_(env.values()),
      certificate_(std::move(certificate)) {
    const int a = env.value_count();
    log_values_.resize(values_.size());
    for (int i = 0; i < a; ++i) log_values_[i] = env.log_value(i);

    const std::size_t n = indices_.size();
    cum_log_.resize(n + 1);
    cum_log_[0] = 0.0;
    counts_.assign(static_cast<std::size_t>(a), std::vector<std::int64_t>(n + 1, 0));
    for (std::size_t k = 0; k < n; ++k) {
        const int idx = indices_[k];
        if (idx < 0 || idx >= a) {
            fail("letter_out_of_range", "path index " + std::to_string(idx) + " outside [0," +
                                            std::to_string(a) + ") at step " + std::to_string(k));
        }
        cum_log_[k + 1] = cum_log_[k] + log_values_[static_cast<std::size_t>(idx)];
        for (int i = 0; i < a; ++i) {
            counts_[static_cast<std::size_t>(i)][k + 1] =
                counts_[static_cast<std::size_t>(i)][k] + (i == idx ? 1 : 0);
        }
    }
}

EnvironmentPath sample_iid(const Environment& env, std::uint64_t seed, std::size_t n) {
    const int a = env.value_count();
    // Cumulative thresholds for CDF inversion; the final slot absorbs any
    // floating shortfall so every u in [0,1) maps to a valid index.
    std::vector<double> cdf(static_cast<std::size_t>(a));
    double acc = 0.0;
    for (int i = 0; i < a; ++i) {
        acc += env.probability(i);
        cdf[static_cast<std::size_t>(i)] = acc;
    }
    CounterRng rng(seed);
    std::vector<int> indices(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = rng.uniform(k);
        int pick = a - 1;
        for (int i = 0; i < a; ++i) {
            if (u < cdf[static_cast<std::size_t>(i)]) {
                pick = i;
                break;
            }
        }
        indices[k] = pick;
    }
    return EnvironmentPath(env, std::move(indices), std::nullopt);
}

EnvironmentPath make_eventually_periodic(const Environment& env, const std::vector<int>& prefix,
                                         const std::vector<int>& cycle, std::size_t n) {
    if (cycle.empty()) fail("empty_cycle", "cycle must be nonempty");
    const int a = env.value_count();
    for (int idx : prefix) {
        if (idx < 0 || idx >= a) fail("letter_out_of_range", "prefix index " + std::to_string(idx));
    }
    for (int idx : cycle) {
        if (idx < 0 || idx >= a) fail("letter_out_of_range", "cycle index " + std::to_string(idx));
    }

    std::vector<int> indices;
    indices.reserve(n);
    for (std::size_t k = 0; k < n && k < prefix.size(); ++k) indices.push_back(prefix[k]);
    while (indices.size() < n) {
        indices.push_back(cycle[(indices.size() - prefix.size()) % cycle.size()]);
    }

    // Exact fluctuation certificate. Frequencies l_i = c_i / |cycle| with
    // c_i the cycle composition. Each full cycle adds exactly c_i to the
    // count of i, so the deviation s_{k,i} - k*l_i repeats with period
    // |cycle| once k is past the prefix; scanning k <= |prefix| + |cycle|
    // therefore covers every deviation the infinite path attains. The scan
    // runs in integers: dev * |cycle| = |cycle|*s_{k,i} - k*c_i.
    const std::int64_t kc = static_cast<std::int64_t>(cycle.size());
    std::vector<std::int64_t> cycle_comp(static_cast<std::size_t>(a), 0);
    for (int idx : cycle) ++cycle_comp[static_cast<std::size_t>(idx)];

    const std::size_t window = prefix.size() + cycle.size();
    std::vector<std::int64_t> s(static_cast<std::size_t>(a), 0);
    std::int64_t dev_lo_num = 0, dev_hi_num = 0; // deviations scaled by kc; k=0 gives 0
    for (std::size_t k = 1; k <= window; ++k) {
        const std::size_t pos = k - 1;
        const int idx = pos < prefix.size() ? prefix[pos]
                                            : cycle[(pos - prefix.size()) % cycle.size()];
        ++s[static_cast<std::size_t>(idx)];
        for (int i = 0; i < a; ++i) {
            const std::int64_t num =
                kc * s[static_cast<std::size_t>(i)] - static_cast<std::int64_t>(k) * cycle_comp[static_cast<std::size_t>(i)];
            dev_lo_num = std::min(dev_lo_num, num);
            dev_hi_num = std::max(dev_hi_num, num);
        }
    }

    PathCertificate cert;
    cert.frequencies.resize(static_cast<std::size_t>(a));
    for (int i = 0; i < a; ++i) {
        cert.frequencies[static_cast<std::size_t>(i)] =
            static_cast<double>(cycle_comp[static_cast<std::size_t>(i)]) / static_cast<double>(kc);
    }
    cert.lo = static_cast<double>(dev_lo_num) / static_cast<double>(kc);
    cert.hi = static_cast<double>(dev_hi_num) / static_cast<double>(kc);
    return EnvironmentPath(env, std::move(indices), std::move(cert));
}

EnvironmentPath make_balanced(const Environment& env, const std::vector<double>& frequencies,
                              std::size_t n) {
    const int a = env.value_count();
    if (static_cast<int>(frequencies.size()) != a) {
        fail("bad_frequencies", "frequency vector has " + std::to_string(frequencies.size()) +
                                    " entries, expected " + std::to_string(a));
    }
    double sum = 0.0;
    for (double l : frequencies) {
        if (!(l >= 0.0)) fail("bad_frequencies", "frequencies must be nonnegative");
        sum += l;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        fail("bad_frequencies", "frequencies must sum to 1, got " + std::to_string(sum));
    }

    std::vector<int> indices(n);
    std::vector<std::int64_t> s(static_cast<std::size_t>(a), 0);
    const double band = static_cast<double>(a);
    for (std::size_t k = 0; k < n; ++k) {
        int pick = 0;
        double best = -1e300;
        for (int i = 0; i < a; ++i) {
            const double score = static_cast<double>(k + 1) * frequencies[static_cast<std::size_t>(i)] -
                                 static_cast<double>(s[static_cast<std::size_t>(i)]);
            if (score > best) {
                best = score;
                pick = i;
            }
        }
        indices[k] = pick;
        ++s[static_cast<std::size_t>(pick)];
        // The greedy rule keeps |s - k*l| well inside +-a; verify rather
        // than trust, since the certificate feeds exact sandwich bounds.
        for (int i = 0; i < a; ++i) {
            const double dev = static_cast<double>(s[static_cast<std::size_t>(i)]) -
                               static_cast<double>(k + 1) * frequencies[static_cast<std::size_t>(i)];
            if (dev < -band || dev > band) {
                fail("internal_error", "balanced constructor deviation " + std::to_string(dev) +
                                           " escaped the certified band at step " + std::to_string(k));
            }
        }
    }

    PathCertificate cert;
    cert.frequencies = frequencies;
    cert.lo = -band;
    cert.hi = band;
    return EnvironmentPath(env, std::move(indices), std::move(cert));
}

std::vector<WalkPoint> letter_walk(const EnvironmentPath& path, int i, double p) {
    if (i < 0 || i >= path.value_count()) fail("letter_out_of_range", "value index " + std::to_string(i));
    std::vector<WalkPoint> out;
    out.reserve(path.length());
    for (std::size_t k = 1; k <= path.length(); ++k) {
        out.push_back({k, static_cast<double>(path.count(i, k)) - static_cast<double>(k) * p});
    }
    return out;
}

std::vector<std::size_t> crossing_times(const EnvironmentPath& path, int i, double p, long m) {
    if (i < 0 || i >= path.value_count()) fail("letter_out_of_range", "value index " + std::to_string(i));
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < path.length(); ++k) {
        const double line = p * static_cast<double>(k) + static_cast<double>(m);
        if (static_cast<double>(path.count(i, k)) <= line &&
            line < static_cast<double>(path.count(i, k + 1))) {
            out.push_back(k);
        }
    }
    return out;
}

double LilSeries::max_over(std::size_t k_lo, std::size_t k_hi) const {
    double best = -1e300;
    for (std::size_t j = 0; j < value.size(); ++j) {
        const std::size_t k = first_k + j;
        if (k < k_lo || k > k_hi) continue;
        best = std::max(best, value[j]);
    }
    return best;
}

LilSeries lil_statistics(const EnvironmentPath& path, int i, double p) {
    if (i < 0 || i >= path.value_count()) fail("letter_out_of_range", "value index " + std::to_string(i));
    if (!(p > 0.0) || !(p < 1.0)) {
        fail("p_degenerate", "normalization needs p strictly inside (0,1), got " + std::to_string(p));
    }
    LilSeries out;
    out.first_k = 16;
    if (path.length() < out.first_k) return out;
    const std::size_t count = path.length() - out.first_k + 1;
    out.value.reserve(count);
    out.running_max.reserve(count);
    out.running_min.reserve(count);
    double run_max = -1e300, run_min = 1e300;
    for (std::size_t k = out.first_k; k <= path.length(); ++k) {
        const double centered = static_cast<double>(path.count(i, k)) - static_cast<double>(k) * p;
        const double norm = std::sqrt(2.0 * p * (1.0 - p) * static_cast<double>(k) *
                                      std::log(std::log(static_cast<double>(k))));
        const double v = centered / norm;
        run_max = std::max(run_max, v);
        run_min = std::min(run_min, v);
        out.value.push_back(v);
        out.running_max.push_back(run_max);
        out.running_min.push_back(run_min);
    }
    return out;
}

std::vector<WalkPoint> drift_sum(const EnvironmentPath& path, const Environment& env) {
    std::vector<WalkPoint> out;
    out.reserve(path.length());
    for (std::size_t k = 1; k <= path.length(); ++k) {
        double d = 0.0;
        for (int i = 0; i < env.value_count(); ++i) {
            d += (static_cast<double>(path.count(i, k)) - static_cast<double>(k) * env.probability(i)) *
                 env.log_value(i);
        }
        out.push_back({k, d});
    }
    return out;
}

} // namespace rcifs
