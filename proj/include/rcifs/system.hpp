#ifndef RCIFS_SYSTEM_HPP
#define RCIFS_SYSTEM_HPP

// Symbolic layer: alphabets, incidence-constrained words, and the affine
// contraction data attached to each letter. A System is an immutable,
// validated bundle; everything downstream (pressure, counting, series)
// consumes it read-only.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcifs/bigint.hpp"

namespace rcifs {

// Declared spectral metadata. Never computed; carried through to reports.
enum class DGenericFlag { none, d_generic, strongly_d_generic };

std::string to_string(DGenericFlag flag);

// Raw, unvalidated description of a system. Mirrors the config schema.
struct SystemConfig {
    std::vector<double> ratios;                  // contraction factor per letter, in (0,1)
    std::vector<std::vector<int>> incidence;     // a x a over {0,1}; incidence[e][e2]=1 means "e then e2" is admissible
    int suffix_letter = 0;                       // the common suffix's first letter
    std::optional<std::vector<double>> placements; // optional left endpoints for interval-overlap validation
    DGenericFlag dgeneric = DGenericFlag::none;
};

// A word is a sequence of letter indices, first letter at index 0.
using Word = std::vector<int>;

class System {
public:
    int letters() const { return static_cast<int>(ratios_.size()); }
    double ratio(int e) const { return ratios_[e]; }
    const std::vector<double>& ratios() const { return ratios_; }
    // log alpha_e (negative) and the letter weight -log alpha_e (positive).
    double log_ratio(int e) const { return log_ratios_[e]; }
    double letter_weight(int e) const { return -log_ratios_[e]; }
    bool edge(int e, int e2) const { return incidence_[static_cast<std::size_t>(e) * ratios_.size() + e2] != 0; }
    int suffix_letter() const { return suffix_letter_; }
    bool may_precede_suffix(int e) const { return edge(e, suffix_letter_); }
    bool equal_ratios() const { return equal_ratios_; }
    const std::optional<std::vector<double>>& placements() const { return placements_; }
    DGenericFlag dgeneric() const { return dgeneric_; }

    // Largest ratio (smallest letter weight); bounds word lengths per threshold.
    double max_ratio() const { return max_ratio_; }

private:
    friend System validate_system(const SystemConfig& raw);

    std::vector<double> ratios_;
    std::vector<double> log_ratios_;
    std::vector<std::uint8_t> incidence_;
    int suffix_letter_ = 0;
    std::optional<std::vector<double>> placements_;
    DGenericFlag dgeneric_ = DGenericFlag::none;
    bool equal_ratios_ = false;
    double max_ratio_ = 0.0;
};

// Checks ratio ranges, matrix shape, exact irreducibility (boolean matrix
// powers up to the alphabet size), and — when placements are present — that
// the letter intervals stay in [0,1] with pairwise disjoint interiors.
// Errors: ratio_out_of_range, letter_out_of_range, not_irreducible,
// osc_violation (each naming the offending index).
System validate_system(const SystemConfig& raw);

// True iff every adjacent letter pair has incidence 1 and, when
// check_suffix is set, the last letter may precede the suffix letter.
// Errors: letter_out_of_range.
bool is_admissible(const System& sys, const Word& word, bool check_suffix);

// Number of admissible words of length n whose last letter may precede the
// suffix letter; exact, via integer matrix powers. Requires n >= 1.
BigInt count_words_length(int n, const System& sys);

// All words counted by count_words_length, in lexicographic order.
// Hard cap n <= 14 (error n_too_large): this is the brute-force oracle.
std::vector<Word> enumerate_words(int n, const System& sys);

// Ergodic sum of the affine potential along the word: sum of log alpha_e
// over the word's letters. Depends only on the letter composition.
double word_log_contraction(const System& sys, const Word& word);

} // namespace rcifs

#endif
