#ifndef RCIFS_TRANSFER_HPP
#define RCIFS_TRANSFER_HPP

// Thermodynamic layer: the weighted transfer matrix, topological pressure as
// its log spectral radius, and the family of growth exponents obtained as
// pressure roots (plain, expected, periodic-environment, fluctuation-shifted).

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rcifs/environment.hpp"
#include "rcifs/errors.hpp"
#include "rcifs/system.hpp"

namespace rcifs {

// Matrix acting on vectors indexed by the leading letter of the suffix:
//   M(s)[b][e] = incidence(e,b) * alpha_e^s,
// so that (M(s)^n * ones)[rho] sums alpha-weights over admissible length-n
// words that may precede rho. Complex powers of the positive ratios use the
// principal branch exp(s*log alpha).
Eigen::MatrixXcd transfer_matrix(const System& sys, std::complex<double> s);

// Real-weighted variant of the same matrix, kept separate so the pressure
// path never leaves real arithmetic.
Eigen::MatrixXd transfer_matrix_real(const System& sys, double x);

// log of the Perron eigenvalue of the x-weighted transfer matrix. Entries
// are built pre-normalized by the dominant letter weight, so no overflow or
// underflow occurs for |x| up to ~1e4. Primary method: Collatz-Wielandt
// power iteration with a two-sided enclosure (relative width 1e-13); if the
// enclosure stalls (imprimitive incidence), falls back to a dense
// eigensolve for alphabets up to 8, else errors no_convergence.
double pressure(const System& sys, double x);

// Unique root of pressure (strictly decreasing); bisection to absolute
// width 1e-12.
double delta(const System& sys);

// pressure(x) + x * (mean log modulus of the environment).
double expected_pressure(const System& sys, const Environment& env, double x);

// Root of the expected pressure.
double delta_lambda(const System& sys, const Environment& env);

// Root of pressure(x) + x * (mean log modulus along prefix+cycle, i.e. the
// cycle average; the finite prefix does not move the Cesaro mean).
// Errors: empty_cycle.
double delta_periodic(const System& sys, const std::vector<double>& cycle,
                      const std::vector<double>& prefix);

// Drift constants for a frequency vector l over the environment's moduli:
// c = sum l_i log|z_i| (the mean step) and d = sum log|z_i| (the full
// one-of-each step). Both are <= 0.
struct FluctuationConstants {
    double c = 0.0;
    double d = 0.0;
};

FluctuationConstants fluctuation_constants(const Environment& env, const std::vector<double>& l);

// Root of pressure(x) + c*x for a constant drift c <= 0; equals delta when
// c = 0.
double delta_bounded_fluctuation(const System& sys, double c);

// Exponent bundle serialized into experiment summaries.
struct ExponentReport {
    double delta = 0.0;
    double delta_lambda_env = 0.0;      // root of expected pressure
    bool has_path_exponent = false;
    double delta_lambda_path = 0.0;     // periodic/balanced path exponent when defined
    double c = 0.0;
    double d = 0.0;
    double bracket_width = 0.0;         // delta - delta_lambda_env
};

// Shared root finder: f must be strictly decreasing with f(0) >= 0; returns
// the midpoint of a bracket of width <= tol (default 1e-12). The upper end
// of the bracket is grown geometrically from 1.
template <class F>
double decreasing_root(F&& f, double tol = 1e-12) {
    double lo = 0.0;
    if (f(lo) < 0.0) return 0.0; // root at or left of 0; callers treat 0 as the floor
    double hi = 1.0;
    int growth = 0;
    while (f(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++growth > 60) fail("no_convergence", "root bracket exceeded 2^60");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace rcifs

#endif
