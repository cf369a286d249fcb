#include "rcifs/transfer.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace rcifs {

Eigen::MatrixXcd transfer_matrix(const System& sys, std::complex<double> s) {
    const int a = sys.letters();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(a, a);
    for (int b = 0; b < a; ++b) {
        for (int e = 0; e < a; ++e) {
            if (sys.edge(e, b)) m(b, e) = std::exp(s * sys.log_ratio(e));
        }
    }
    return m;
}

Eigen::MatrixXd transfer_matrix_real(const System& sys, double x) {
    const int a = sys.letters();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a, a);
    for (int b = 0; b < a; ++b) {
        for (int e = 0; e < a; ++e) {
            if (sys.edge(e, b)) m(b, e) = std::exp(x * sys.log_ratio(e));
        }
    }
    return m;
}

namespace {

// Perron root of a nonnegative irreducible matrix with no zero rows.
// Collatz-Wielandt enclosure: for positive v, min_i (Bv)_i/v_i and
// max_i (Bv)_i/v_i bracket the Perron root, and the bracket contracts
// under iteration when the matrix is primitive. Imprimitive matrices keep
// the bracket open, so after a generous iteration budget we fall back to a
// dense eigensolve (exact for these tiny alphabets).
double perron_root(const Eigen::MatrixXd& m, int a) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(a);
    double lo = 0.0, hi = 0.0;
    for (int iter = 0; iter < 20000; ++iter) {
        Eigen::VectorXd w = m * v;
        lo = 1e300;
        hi = 0.0;
        for (int i = 0; i < a; ++i) {
            const double q = w(i) / v(i);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        if (hi - lo <= 1e-13 * hi) return 0.5 * (lo + hi);
        v = w / w.maxCoeff();
    }
    if (a <= 8) {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
        double r = 0.0;
        for (int i = 0; i < a; ++i) r = std::max(r, std::abs(solver.eigenvalues()(i)));
        return r;
    }
    fail("no_convergence", "Perron enclosure did not contract and the alphabet exceeds the dense fallback cap");
}

} // namespace

double pressure(const System& sys, double x) {
    const int a = sys.letters();
    // Normalize by the dominant letter weight so entries stay in [0,1]:
    // pressure(x) = shift + log r(M-hat) with M-hat = e^{-shift} M.
    double shift = -1e300;
    for (int e = 0; e < a; ++e) shift = std::max(shift, x * sys.log_ratio(e));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a, a);
    for (int b = 0; b < a; ++b) {
        for (int e = 0; e < a; ++e) {
            if (sys.edge(e, b)) m(b, e) = std::exp(x * sys.log_ratio(e) - shift);
        }
    }
    return shift + std::log(perron_root(m, a));
}

double delta(const System& sys) {
    return decreasing_root([&](double x) { return pressure(sys, x); });
}

double expected_pressure(const System& sys, const Environment& env, double x) {
    return pressure(sys, x) + x * env.mean_log_value();
}

double delta_lambda(const System& sys, const Environment& env) {
    return decreasing_root([&](double x) { return expected_pressure(sys, env, x); });
}

double delta_periodic(const System& sys, const std::vector<double>& cycle,
                      const std::vector<double>& prefix) {
    (void)prefix; // the Cesaro mean of log-moduli ignores any finite prefix
    if (cycle.empty()) fail("empty_cycle", "cycle must be nonempty");
    double mean = 0.0;
    for (double z : cycle) {
        if (!(z > 0.0) || !(z <= 1.0)) {
            fail("ratio_out_of_range", "cycle modulus " + std::to_string(z) + " outside (0,1]");
        }
        mean += std::log(z);
    }
    mean /= static_cast<double>(cycle.size());
    return decreasing_root([&](double x) { return pressure(sys, x) + x * mean; });
}

FluctuationConstants fluctuation_constants(const Environment& env, const std::vector<double>& l) {
    if (static_cast<int>(l.size()) != env.value_count()) {
        fail("bad_frequencies", "frequency vector has " + std::to_string(l.size()) + " entries, expected " +
                                    std::to_string(env.value_count()));
    }
    FluctuationConstants out;
    for (int i = 0; i < env.value_count(); ++i) {
        out.c += l[static_cast<std::size_t>(i)] * env.log_value(i);
        out.d += env.log_value(i);
    }
    return out;
}

double delta_bounded_fluctuation(const System& sys, double c) {
    if (c > 0.0) fail("ratio_out_of_range", "drift constant must be <= 0, got " + std::to_string(c));
    return decreasing_root([&](double x) { return pressure(sys, x) + x * c; });
}

} // namespace rcifs
