#ifndef RCIFS_ENVIRONMENT_HPP
#define RCIFS_ENVIRONMENT_HPP

// Random environments over a finite modulus set: i.i.d. sampling with the
// counter-based generator, eventually-periodic and balanced (bounded-
// fluctuation) constructors, and the walk statistics built on letter counts.

#include <cstdint>
#include <optional>
#include <vector>

#include "rcifs/rng.hpp"

namespace rcifs {

// Raw, unvalidated environment description. `values` are the moduli |z_i|.
struct EnvironmentConfig {
    std::vector<double> values;         // pairwise distinct, each in (epsilon, 1]
    std::vector<double> probabilities;  // nonnegative, sums to 1
    double epsilon = 1e-9;              // declared uniform lower bound on moduli
};

class Environment {
public:
    int value_count() const { return static_cast<int>(values_.size()); }
    double value(int i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    double log_value(int i) const { return log_values_[i]; }
    double probability(int i) const { return probabilities_[i]; }
    const std::vector<double>& probabilities() const { return probabilities_; }
    double epsilon() const { return epsilon_; }
    // Mean step drift sum p_i * log|z_i| (<= 0).
    double mean_log_value() const { return mean_log_value_; }

private:
    friend Environment validate_environment(const EnvironmentConfig& raw);

    std::vector<double> values_;
    std::vector<double> log_values_;
    std::vector<double> probabilities_;
    double epsilon_ = 0.0;
    double mean_log_value_ = 0.0;
};

// Checks value ranges/distinctness and that probabilities sum to 1 within
// 1e-12. Errors: bad_frequencies (probability shape), ratio_out_of_range
// (modulus outside (epsilon, 1]).
Environment validate_environment(const EnvironmentConfig& raw);

// Uniform fluctuation certificate: for every prefix length k and value i,
//   k*frequencies[i] + lo <= (count of i among first k) <= k*frequencies[i] + hi.
struct PathCertificate {
    std::vector<double> frequencies;
    double lo = 0.0;
    double hi = 0.0;
};

// A realized modulus sequence with its cumulative log and letter-count
// tables precomputed, plus (for the constructed families) a fluctuation
// certificate. Immutable after construction.
class EnvironmentPath {
public:
    std::size_t length() const { return indices_.size(); }
    int index_at(std::size_t k) const { return indices_[k]; }
    const std::vector<int>& indices() const { return indices_; }
    double modulus_at(std::size_t k) const { return values_[static_cast<std::size_t>(indices_[k])]; }
    // Lambda_k = sum of log moduli over the first k steps; defined for k = 0..length.
    double cum_log(std::size_t k) const { return cum_log_[k]; }
    // s_{k,i} = occurrences of value i among the first k steps; k = 0..length.
    std::int64_t count(int i, std::size_t k) const { return counts_[static_cast<std::size_t>(i)][k]; }
    int value_count() const { return static_cast<int>(values_.size()); }
    double value(int i) const { return values_[i]; }
    double log_value(int i) const { return log_values_[i]; }
    const std::optional<PathCertificate>& certificate() const { return certificate_; }

    // Internal-use constructor: builds the derived tables from realized
    // indices. Callers go through sample_iid / make_* below.
    EnvironmentPath(const Environment& env, std::vector<int> indices,
                    std::optional<PathCertificate> certificate);

private:
    std::vector<int> indices_;
    std::vector<double> values_;
    std::vector<double> log_values_;
    std::vector<double> cum_log_;
    std::vector<std::vector<std::int64_t>> counts_;
    std::optional<PathCertificate> certificate_;
};

// n categorical draws using CounterRng(seed); draw k consumes exactly one
// generator value, so prefixes of longer samples are identical.
EnvironmentPath sample_iid(const Environment& env, std::uint64_t seed, std::size_t n);

// prefix then cycle repeated, truncated at total length n. Attaches an
// exact bounded-fluctuation certificate computed from the cycle composition
// (integer arithmetic; deviations repeat with period |cycle| past the
// prefix, so scanning one window is exhaustive). Errors: empty_cycle,
// letter_out_of_range.
EnvironmentPath make_eventually_periodic(const Environment& env, const std::vector<int>& prefix,
                                         const std::vector<int>& cycle, std::size_t n);

// Greedy balanced constructor: step k picks argmax_i((k+1)*l_i - s_{k,i}),
// ties to the lowest index. The output is verified at construction to stay
// within +-value_count of k*l_i and carries that certificate.
// Errors: bad_frequencies.
EnvironmentPath make_balanced(const Environment& env, const std::vector<double>& frequencies,
                              std::size_t n);

struct WalkPoint {
    std::size_t k;
    double value;
};

// Centered letter-count walk s_{k,i} - k*p for k = 1..length.
std::vector<WalkPoint> letter_walk(const EnvironmentPath& path, int i, double p);

// All k < length with s_k <= p*k + m < s_{k+1} for the value-i walk.
std::vector<std::size_t> crossing_times(const EnvironmentPath& path, int i, double p, long m);

// Normalized walk (s_{k,i} - kp)/sqrt(2p(1-p) * k * log log k) for k >= 16,
// with running extrema. Errors: p_degenerate when p is 0 or 1.
struct LilSeries {
    std::size_t first_k = 16;
    std::vector<double> value;        // entry j corresponds to k = first_k + j
    std::vector<double> running_max;
    std::vector<double> running_min;

    double max_over(std::size_t k_lo, std::size_t k_hi) const; // max of value on [k_lo, k_hi]
};

LilSeries lil_statistics(const EnvironmentPath& path, int i, double p);

// Drift series sum_i (s_{k,i} - k*p_i) * log|z_i| for k = 1..length; equals
// Lambda_k - k * mean_log_value identically.
std::vector<WalkPoint> drift_sum(const EnvironmentPath& path, const Environment& env);

} // namespace rcifs

#endif
