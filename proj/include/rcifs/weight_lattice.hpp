#ifndef RCIFS_WEIGHT_LATTICE_HPP
#define RCIFS_WEIGHT_LATTICE_HPP

// Exact sign decisions for differences of word weights. Every weight in the
// counting layer is an integer combination of the quantities -log(base),
// where base ranges over the distinct contraction ratios and environment
// moduli. Ties and near-ties are therefore decidable exactly: identical
// exponent vectors are equal by construction, and any other comparison
// reduces to ordering two products of powers of doubles — i.e. of dyadic
// rationals — which big-integer arithmetic settles without tolerance.

#include <cstdint>
#include <vector>

#include "rcifs/environment.hpp"
#include "rcifs/system.hpp"

namespace rcifs {

class WeightLattice {
public:
    // Bases are the system's ratios plus (when a path is attached) the
    // path's modulus values, deduplicated by exact double equality so that
    // e.g. equal-ratio systems collapse to a single letter slot.
    WeightLattice(const System& sys, const EnvironmentPath* path);

    int slots() const { return static_cast<int>(bases_.size()); }
    int letter_slot(int e) const { return letter_slot_[static_cast<std::size_t>(e)]; }
    bool has_value_slots() const { return !value_slot_.empty(); }
    int value_slot(int i) const { return value_slot_[static_cast<std::size_t>(i)]; }
    double neg_log(int slot) const { return neg_log_[static_cast<std::size_t>(slot)]; }

    // Sign of sum_j coeff[j] * (-log base_j): -1, 0, or +1. Fast path is a
    // floating evaluation with a conservative error envelope; anything
    // inside the envelope falls through to the exact product comparison.
    int sign(const std::vector<std::int64_t>& coeff) const;

    // The exact branch, exposed for targeted tests.
    int exact_sign(const std::vector<std::int64_t>& coeff) const;

private:
    std::vector<double> bases_;
    std::vector<double> neg_log_;
    std::vector<int> letter_slot_;
    std::vector<int> value_slot_;
};

} // namespace rcifs

#endif
