#include "rcifs/weight_lattice.hpp"

#include <cmath>

#include "rcifs/bigint.hpp"
#include "rcifs/errors.hpp"

namespace rcifs {

namespace {

int find_or_add(std::vector<double>& bases, double b) {
    for (std::size_t j = 0; j < bases.size(); ++j) {
        if (bases[j] == b) return static_cast<int>(j);
    }
    bases.push_back(b);
    return static_cast<int>(bases.size()) - 1;
}

} // namespace

WeightLattice::WeightLattice(const System& sys, const EnvironmentPath* path) {
    letter_slot_.resize(static_cast<std::size_t>(sys.letters()));
    for (int e = 0; e < sys.letters(); ++e) {
        letter_slot_[static_cast<std::size_t>(e)] = find_or_add(bases_, sys.ratio(e));
    }
    if (path != nullptr) {
        value_slot_.resize(static_cast<std::size_t>(path->value_count()));
        for (int i = 0; i < path->value_count(); ++i) {
            value_slot_[static_cast<std::size_t>(i)] = find_or_add(bases_, path->value(i));
        }
    }
    neg_log_.resize(bases_.size());
    for (std::size_t j = 0; j < bases_.size(); ++j) neg_log_[j] = -std::log(bases_[j]);
}

int WeightLattice::sign(const std::vector<std::int64_t>& coeff) const {
    if (coeff.size() != bases_.size()) {
        fail("internal_error", "lattice coefficient vector has wrong length");
    }
    bool all_zero = true;
    double total = 0.0, magnitude = 0.0;
    for (std::size_t j = 0; j < coeff.size(); ++j) {
        if (coeff[j] == 0) continue;
        all_zero = false;
        const double term = static_cast<double>(coeff[j]) * neg_log_[j];
        total += term;
        magnitude += std::fabs(term);
    }
    if (all_zero) return 0;
    // Envelope: each -log(base) is accurate to ~1 ulp and the sum adds at
    // most a few more, so 1e-14 * magnitude dominates the true error by two
    // orders. Only comparisons landing inside go to exact arithmetic.
    if (std::fabs(total) > 1e-14 * magnitude) return total > 0.0 ? 1 : -1;
    return exact_sign(coeff);
}

int WeightLattice::exact_sign(const std::vector<std::int64_t>& coeff) const {
    // sum coeff_j * (-log base_j) > 0  <=>  prod base_j^{coeff_j} < 1.
    // Split each base into its 53-bit mantissa and exponent: base = M * 2^(E-53)
    // with M integer in [2^52, 2^53). Then
    //   prod base^c = (prod_{c>0} M^c / prod_{c<0} M^{-c}) * 2^S,
    // and the comparison against 1 is integer vs integer after shifting.
    BigInt num = 1, den = 1;
    std::int64_t shift = 0;
    for (std::size_t j = 0; j < coeff.size(); ++j) {
        const std::int64_t c = coeff[j];
        if (c == 0) continue;
        int exp2 = 0;
        const double frac = std::frexp(bases_[j], &exp2); // bases_ in (0,1]: frac in [0.5,1)
        const auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
        const auto power = static_cast<unsigned>(c > 0 ? c : -c);
        const BigInt factor = boost::multiprecision::pow(BigInt(mant), power);
        if (c > 0) {
            num *= factor;
        } else {
            den *= factor;
        }
        shift += c * static_cast<std::int64_t>(exp2 - 53);
    }
    if (shift >= 0) {
        num <<= static_cast<unsigned>(shift);
    } else {
        den <<= static_cast<unsigned>(-shift);
    }
    // num/den = prod base^c; product < 1 means the weighted sum is positive.
    if (num < den) return 1;
    if (num > den) return -1;
    return 0;
}

} // namespace rcifs
