#ifndef RCIFS_POINCARE_HPP
#define RCIFS_POINCARE_HPP

// Random Poincare series machinery: truncated evaluation along a realized
// path, exact closed forms for (eventually) periodic environments via a
// geometric-tail linear solve, a windowed growth estimator for the critical
// abscissa, and the theta(s) zero scan for periodic two-ratio systems.

#include <complex>
#include <cstddef>
#include <vector>

#include "rcifs/environment.hpp"
#include "rcifs/system.hpp"

namespace rcifs {

// Truncated series with per-term diagnostics. term_n = exp(s*Lambda_n)
// times the transfer-weighted census of length-n words.
struct SeriesEvaluation {
    std::complex<double> s;
    std::size_t truncation = 0;
    std::vector<std::complex<double>> partial_sums; // entry n-1 = sum of first n terms
    std::vector<double> term_magnitudes;
    bool cauchy = false;      // term magnitudes non-increasing over the final stretch
    double tail_bound = -1.0; // geometric tail estimate when the terms decay; -1 otherwise
};

// One matrix-vector product per step; path must cover N steps.
// Errors: path_too_short.
SeriesEvaluation eta_partial(const System& sys, const EnvironmentPath& path,
                             std::complex<double> s, std::size_t n_terms);

// Exact sum for a path that is `prefix` then `cycle` repeated forever:
// finite head plus a geometric tail summed by solving (I - G)v = u with
// G = (product of cycle moduli)^s * M(s)^{cycle length}.
// Errors: empty_cycle; tail_divergent when the spectral radius of G is
// >= 1 - 1e-9 (s at or left of the critical line).
std::complex<double> eta_closed_periodic(const System& sys, const std::vector<double>& prefix,
                                         const std::vector<double>& cycle, std::complex<double> s);

// Root of the windowed growth rate
//   g(x) = mean over n in [N-window, N] of (log (M(x)^n 1)_rho + x*Lambda_n)/n,
// located by bisection; g is strictly decreasing in x. The matrix powers are
// evaluated with per-step renormalization, so N of 1e5+ stays in range.
// pre: N >= 1000, window <= N/2, path length >= N.
// Errors: path_too_short.
double abscissa_estimate(const System& sys, const EnvironmentPath& path, std::size_t n_terms,
                         std::size_t window);

// theta(s) = 1 - (sum_e ratio_e^s)^m * prod_j cycle_j^s: the denominator
// whose zeros are the candidate poles of the closed periodic series for an
// m-fold composition of the base system along the given modulus cycle.
struct ThetaParams {
    std::vector<double> ratios{0.5, 1.0 / 3.0};
    int m = 1;
    std::vector<double> cycle; // length m
};

std::complex<double> theta(const ThetaParams& params, std::complex<double> s);
std::complex<double> theta_prime(const ThetaParams& params, std::complex<double> s);

struct ThetaZero {
    double x = 0.0;
    double y = 0.0;
    double abs_theta = 0.0;
    double abs_theta_prime = 0.0;
    bool simple = false; // |theta'| > 1e-8 at the zero
};

struct ZeroScanResult {
    double x0 = 0.0;                 // real zero of theta on the real axis
    std::vector<double> grid_y;      // scan ordinates
    std::vector<double> grid_abs;    // |theta(x0 + iy)| on the grid
    std::vector<ThetaZero> zeros;    // polished zeros, deduplicated
    double min_offaxis_abs = 0.0;    // smallest grid minimum with |y| >= 0.5
};

// Bisection for x0, |theta| scan on y in [-y_max, y_max], Newton polish of
// any local minimum below 1e-6. pre: grid_step <= 0.01.
ZeroScanResult zero_scan(const ThetaParams& params, double y_max, double grid_step);

} // namespace rcifs

#endif
