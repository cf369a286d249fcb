#include "rcifs/poincare.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "rcifs/errors.hpp"
#include "rcifs/transfer.hpp"

namespace rcifs {

SeriesEvaluation eta_partial(const System& sys, const EnvironmentPath& path,
                             std::complex<double> s, std::size_t n_terms) {
    if (path.length() < n_terms) {
        fail("path_too_short", "series truncation " + std::to_string(n_terms) + " exceeds path length " +
                                   std::to_string(path.length()));
    }
    const Eigen::MatrixXcd m = transfer_matrix(sys, s);
    const int rho = sys.suffix_letter();

    SeriesEvaluation out;
    out.s = s;
    out.truncation = n_terms;
    out.partial_sums.reserve(n_terms);
    out.term_magnitudes.reserve(n_terms);

    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(sys.letters());
    std::complex<double> sum = 0.0;
    for (std::size_t n = 1; n <= n_terms; ++n) {
        v = m * v;
        const std::complex<double> term = std::exp(s * path.cum_log(n)) * v(rho);
        sum += term;
        out.partial_sums.push_back(sum);
        out.term_magnitudes.push_back(std::abs(term));
    }

    // Diagnostics over the last stretch of terms: non-increasing magnitudes
    // mark the convergent side, and the measured decay rate gives a
    // geometric tail bound when it is genuinely below 1.
    const std::size_t window = std::min<std::size_t>(10, n_terms > 1 ? n_terms - 1 : 0);
    bool monotone = n_terms >= 2;
    for (std::size_t j = n_terms - window; monotone && j < n_terms; ++j) {
        if (out.term_magnitudes[j] > out.term_magnitudes[j - 1] * (1.0 + 1e-12)) monotone = false;
    }
    out.cauchy = monotone && n_terms >= 2;
    if (out.cauchy && window >= 2) {
        const double head = out.term_magnitudes[n_terms - window - 1];
        const double tail = out.term_magnitudes[n_terms - 1];
        if (head > 0.0 && tail > 0.0) {
            const double rate = std::pow(tail / head, 1.0 / static_cast<double>(window));
            if (rate < 1.0) out.tail_bound = out.term_magnitudes[n_terms - 1] * rate / (1.0 - rate);
        }
    }
    return out;
}

std::complex<double> eta_closed_periodic(const System& sys, const std::vector<double>& prefix,
                                         const std::vector<double>& cycle, std::complex<double> s) {
    if (cycle.empty()) fail("empty_cycle", "cycle must be nonempty");
    for (double z : prefix) {
        if (!(z > 0.0) || !(z <= 1.0)) fail("ratio_out_of_range", "prefix modulus outside (0,1]");
    }
    for (double z : cycle) {
        if (!(z > 0.0) || !(z <= 1.0)) fail("ratio_out_of_range", "cycle modulus outside (0,1]");
    }

    const int a = sys.letters();
    const int rho = sys.suffix_letter();
    const Eigen::MatrixXcd m = transfer_matrix(sys, s);

    // Head: terms n = 1..|prefix| evaluated directly.
    const std::size_t m0 = prefix.size();
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(a);
    std::complex<double> head = 0.0;
    double lambda = 0.0; // Lambda_n along the prefix
    for (std::size_t n = 1; n <= m0; ++n) {
        v = m * v;
        lambda += std::log(prefix[n - 1]);
        head += std::exp(s * lambda) * v(rho);
    }
    // v now equals M^{m0} * ones and lambda = Lambda_{m0}.

    // Tail: with C_r the cumulative log over the first r cycle entries and
    // L = C_k the full-cycle log, term m0+jk+r factors as
    //   exp(s*Lambda_{m0}) * exp(s*C_r) * M^r * (exp(s*L) M^k)^j * v,
    // because powers of M commute. Summing over j >= 0 is the geometric
    // series in G = exp(s*L) M^k, evaluated by solving (I - G)u = v.
    const std::size_t k = cycle.size();
    std::vector<double> cum(k + 1, 0.0);
    for (std::size_t r = 0; r < k; ++r) cum[r + 1] = cum[r] + std::log(cycle[r]);

    Eigen::MatrixXcd mk = Eigen::MatrixXcd::Identity(a, a);
    for (std::size_t r = 0; r < k; ++r) mk = m * mk;
    const Eigen::MatrixXcd g = std::exp(s * cum[k]) * mk;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eigen(g, /*computeEigenvectors=*/false);
    double radius = 0.0;
    for (int i = 0; i < a; ++i) radius = std::max(radius, std::abs(eigen.eigenvalues()(i)));
    if (radius >= 1.0 - 1e-9) {
        fail("tail_divergent", "cycle tail has spectral radius " + std::to_string(radius) +
                                   "; s is at or left of the critical line");
    }

    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(a, a);
    const Eigen::VectorXcd u = (identity - g).partialPivLu().solve(v);

    std::complex<double> tail = 0.0;
    Eigen::VectorXcd vr = u;
    for (std::size_t r = 1; r <= k; ++r) {
        vr = m * vr;
        tail += std::exp(s * cum[r]) * vr(rho);
    }
    return head + std::exp(s * lambda) * tail;
}

double abscissa_estimate(const System& sys, const EnvironmentPath& path, std::size_t n_terms,
                         std::size_t window) {
    if (n_terms < 1000) fail("internal_error", "abscissa estimator needs at least 1000 terms");
    if (window > n_terms / 2) fail("internal_error", "estimator window exceeds half the truncation");
    if (path.length() < n_terms) {
        fail("path_too_short", "estimator truncation exceeds path length");
    }
    const int rho = sys.suffix_letter();

    // g(x): propagate v <- M(x) v with renormalization, accumulating the log
    // scale; the windowed mean of (log(M^n 1)_rho + x*Lambda_n)/n decreases
    // strictly in x and vanishes at the abscissa.
    auto growth = [&](double x) {
        const Eigen::MatrixXd m = transfer_matrix_real(sys, x);
        Eigen::VectorXd v = Eigen::VectorXd::Ones(sys.letters());
        double log_scale = 0.0;
        double acc = 0.0;
        std::size_t used = 0;
        for (std::size_t n = 1; n <= n_terms; ++n) {
            v = m * v;
            const double peak = v.maxCoeff();
            v /= peak;
            log_scale += std::log(peak);
            if (n + window >= n_terms) {
                const double log_term = log_scale + std::log(v(rho)) + x * path.cum_log(n);
                acc += log_term / static_cast<double>(n);
                ++used;
            }
        }
        return acc / static_cast<double>(used);
    };

    double lo = 0.0, hi = 1.0;
    if (growth(lo) <= 0.0) return 0.0;
    int grow = 0;
    while (growth(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 40) fail("no_convergence", "abscissa bracket exceeded 2^40");
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (growth(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::complex<double> theta(const ThetaParams& params, std::complex<double> s) {
    std::complex<double> base = 0.0;
    for (double r : params.ratios) base += std::exp(s * std::log(r));
    std::complex<double> product = std::pow(base, params.m);
    for (double z : params.cycle) product *= std::exp(s * std::log(z));
    return 1.0 - product;
}

std::complex<double> theta_prime(const ThetaParams& params, std::complex<double> s) {
    // theta = 1 - B(s)^m * P(s) with B = sum r_e^s, P = prod z_j^s:
    // theta' = -(m * B' * B^{m-1} * P + B^m * P * sum log z_j).
    std::complex<double> base = 0.0, base_prime = 0.0;
    for (double r : params.ratios) {
        const std::complex<double> pw = std::exp(s * std::log(r));
        base += pw;
        base_prime += std::log(r) * pw;
    }
    std::complex<double> product = 1.0;
    double log_cycle = 0.0;
    for (double z : params.cycle) {
        product *= std::exp(s * std::log(z));
        log_cycle += std::log(z);
    }
    const std::complex<double> bm1 = std::pow(base, params.m - 1);
    return -(static_cast<double>(params.m) * base_prime * bm1 * product +
             bm1 * base * product * log_cycle);
}

ZeroScanResult zero_scan(const ThetaParams& params, double y_max, double grid_step) {
    if (!(grid_step > 0.0) || grid_step > 0.01) {
        fail("internal_error", "zero scan needs a grid step in (0, 0.01]");
    }
    if (params.m < 1 || static_cast<int>(params.cycle.size()) != params.m) {
        fail("empty_cycle", "theta needs a cycle of length m");
    }
    for (double z : params.cycle) {
        if (!(z > 0.0) || !(z <= 1.0)) fail("ratio_out_of_range", "cycle modulus outside (0,1]");
    }

    ZeroScanResult out;

    // Real zero: theta(x) = 1 - (sum r^x)^m prod z^x is strictly increasing,
    // negative at 0 (the ratio sum is the letter count >= 2). Bisect, then
    // the slope bound keeps |theta(x0)| within ~1e-13.
    auto theta_real = [&](double x) { return theta(params, {x, 0.0}).real(); };
    double lo = 0.0, hi = 1.0;
    int grow = 0;
    while (theta_real(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 40) fail("no_convergence", "real zero bracket exceeded 2^40");
    }
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (theta_real(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.x0 = 0.5 * (lo + hi);

    const auto steps = static_cast<long>(std::llround(y_max / grid_step));
    out.grid_y.reserve(static_cast<std::size_t>(2 * steps + 1));
    out.grid_abs.reserve(static_cast<std::size_t>(2 * steps + 1));
    for (long j = -steps; j <= steps; ++j) {
        const double y = static_cast<double>(j) * grid_step;
        out.grid_y.push_back(y);
        out.grid_abs.push_back(std::abs(theta(params, {out.x0, y})));
    }

    // Local grid minima: polish those below 1e-6 with complex Newton; track
    // the smallest off-axis minimum as the separation witness.
    double min_offaxis = 1e300;
    for (std::size_t j = 1; j + 1 < out.grid_abs.size(); ++j) {
        const double v = out.grid_abs[j];
        if (!(v <= out.grid_abs[j - 1] && v <= out.grid_abs[j + 1])) continue;
        if (std::fabs(out.grid_y[j]) >= 0.5) min_offaxis = std::min(min_offaxis, v);
        if (v >= 1e-6) continue;
        std::complex<double> z(out.x0, out.grid_y[j]);
        bool converged = false;
        for (int iter = 0; iter < 50; ++iter) {
            const std::complex<double> f = theta(params, z);
            if (std::abs(f) <= 1e-12) {
                converged = true;
                break;
            }
            const std::complex<double> fp = theta_prime(params, z);
            if (std::abs(fp) == 0.0) break;
            z -= f / fp;
        }
        if (!converged) continue;
        bool duplicate = false;
        for (const ThetaZero& existing : out.zeros) {
            if (std::hypot(existing.x - z.real(), existing.y - z.imag()) < 1e-8) duplicate = true;
        }
        if (duplicate) continue;
        ThetaZero zero;
        zero.x = z.real();
        zero.y = z.imag();
        zero.abs_theta = std::abs(theta(params, z));
        zero.abs_theta_prime = std::abs(theta_prime(params, z));
        zero.simple = zero.abs_theta_prime > 1e-8;
        out.zeros.push_back(zero);
    }
    out.min_offaxis_abs = min_offaxis == 1e300 ? -1.0 : min_offaxis;
    return out;
}

} // namespace rcifs
