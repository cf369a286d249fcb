#include "rcifs/system.hpp"

#include <algorithm>
#include <cmath>

#include "rcifs/errors.hpp"

namespace rcifs {

std::string to_string(DGenericFlag flag) {
    switch (flag) {
        case DGenericFlag::d_generic: return "d_generic";
        case DGenericFlag::strongly_d_generic: return "strongly_d_generic";
        default: return "none";
    }
}

namespace {

// Boolean reachability closure: R = I + B + B^2 + ... + B^(a-1), enough to
// witness every connection in an a-letter graph if one exists. Entry (e,e2)
// of the result is true iff some power of B has a positive (e,e2) entry.
std::vector<std::uint8_t> reachability(const std::vector<std::uint8_t>& b, int a) {
    std::vector<std::uint8_t> reach = b; // paths of length exactly 1..a accumulate here
    std::vector<std::uint8_t> power = b;
    for (int step = 2; step <= a; ++step) {
        std::vector<std::uint8_t> next(static_cast<std::size_t>(a) * a, 0);
        for (int i = 0; i < a; ++i) {
            for (int k = 0; k < a; ++k) {
                if (!power[static_cast<std::size_t>(i) * a + k]) continue;
                for (int j = 0; j < a; ++j) {
                    if (b[static_cast<std::size_t>(k) * a + j]) next[static_cast<std::size_t>(i) * a + j] = 1;
                }
            }
        }
        power.swap(next);
        for (std::size_t idx = 0; idx < reach.size(); ++idx) {
            reach[idx] = static_cast<std::uint8_t>(reach[idx] | power[idx]);
        }
    }
    return reach;
}

} // namespace

System validate_system(const SystemConfig& raw) {
    const int a = static_cast<int>(raw.ratios.size());
    if (a < 2) fail("letter_out_of_range", "need at least 2 letters, got " + std::to_string(a));

    for (int e = 0; e < a; ++e) {
        const double r = raw.ratios[e];
        if (!(r > 0.0) || !(r < 1.0) || !std::isfinite(r)) {
            fail("ratio_out_of_range",
                 "ratio at letter " + std::to_string(e) + " is " + std::to_string(r) +
                     ", must lie strictly inside (0,1)");
        }
    }

    if (static_cast<int>(raw.incidence.size()) != a) {
        fail("letter_out_of_range", "incidence has " + std::to_string(raw.incidence.size()) +
                                        " rows, expected " + std::to_string(a));
    }
    std::vector<std::uint8_t> inc(static_cast<std::size_t>(a) * a, 0);
    for (int e = 0; e < a; ++e) {
        if (static_cast<int>(raw.incidence[e].size()) != a) {
            fail("letter_out_of_range", "incidence row " + std::to_string(e) + " has " +
                                            std::to_string(raw.incidence[e].size()) + " entries, expected " +
                                            std::to_string(a));
        }
        for (int e2 = 0; e2 < a; ++e2) {
            const int v = raw.incidence[e][e2];
            if (v != 0 && v != 1) {
                fail("letter_out_of_range", "incidence[" + std::to_string(e) + "][" + std::to_string(e2) +
                                                "] = " + std::to_string(v) + ", must be 0 or 1");
            }
            inc[static_cast<std::size_t>(e) * a + e2] = static_cast<std::uint8_t>(v);
        }
    }

    if (raw.suffix_letter < 0 || raw.suffix_letter >= a) {
        fail("letter_out_of_range", "suffix letter " + std::to_string(raw.suffix_letter) +
                                        " outside [0," + std::to_string(a) + ")");
    }

    const auto reach = reachability(inc, a);
    for (int e = 0; e < a; ++e) {
        for (int e2 = 0; e2 < a; ++e2) {
            if (!reach[static_cast<std::size_t>(e) * a + e2]) {
                fail("not_irreducible", "no admissible word leads from letter " + std::to_string(e) +
                                            " to letter " + std::to_string(e2));
            }
        }
    }

    if (raw.placements) {
        if (static_cast<int>(raw.placements->size()) != a) {
            fail("letter_out_of_range", "placements has " + std::to_string(raw.placements->size()) +
                                            " entries, expected " + std::to_string(a));
        }
        // Letter e occupies [beta_e, beta_e + alpha_e]; all images must fit in
        // [0,1] and interiors must not overlap.
        std::vector<int> order(a);
        for (int e = 0; e < a; ++e) order[e] = e;
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            return (*raw.placements)[x] < (*raw.placements)[y];
        });
        for (int e = 0; e < a; ++e) {
            const double lo = (*raw.placements)[e];
            const double hi = lo + raw.ratios[e];
            if (lo < 0.0 || hi > 1.0) {
                fail("osc_violation", "image of letter " + std::to_string(e) + " = [" + std::to_string(lo) +
                                          "," + std::to_string(hi) + "] leaves [0,1]");
            }
        }
        for (int k = 0; k + 1 < a; ++k) {
            const int e = order[k], e2 = order[k + 1];
            const double end = (*raw.placements)[e] + raw.ratios[e];
            if (end > (*raw.placements)[e2]) {
                fail("osc_violation", "images of letters " + std::to_string(e) + " and " + std::to_string(e2) +
                                          " overlap in their interiors");
            }
        }
    }

    System sys;
    sys.ratios_ = raw.ratios;
    sys.log_ratios_.resize(raw.ratios.size());
    for (int e = 0; e < a; ++e) sys.log_ratios_[e] = std::log(raw.ratios[e]);
    sys.incidence_ = std::move(inc);
    sys.suffix_letter_ = raw.suffix_letter;
    sys.placements_ = raw.placements;
    sys.dgeneric_ = raw.dgeneric;
    sys.equal_ratios_ = std::all_of(raw.ratios.begin(), raw.ratios.end(),
                                    [&](double r) { return r == raw.ratios[0]; });
    sys.max_ratio_ = *std::max_element(raw.ratios.begin(), raw.ratios.end());
    return sys;
}

bool is_admissible(const System& sys, const Word& word, bool check_suffix) {
    if (word.empty()) fail("letter_out_of_range", "word is empty");
    const int a = sys.letters();
    for (int e : word) {
        if (e < 0 || e >= a) {
            fail("letter_out_of_range", "letter " + std::to_string(e) + " outside [0," + std::to_string(a) + ")");
        }
    }
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
        if (!sys.edge(word[i], word[i + 1])) return false;
    }
    if (check_suffix && !sys.may_precede_suffix(word.back())) return false;
    return true;
}

BigInt count_words_length(int n, const System& sys) {
    if (n < 1) fail("letter_out_of_range", "word length must be >= 1, got " + std::to_string(n));
    const int a = sys.letters();
    // v[e] = number of admissible words of length m ending in e; extend one
    // letter at a time. Start at m=1: one word per letter.
    std::vector<BigInt> v(a, BigInt(1));
    for (int m = 2; m <= n; ++m) {
        std::vector<BigInt> next(a, BigInt(0));
        for (int e = 0; e < a; ++e) {
            if (v[e] == 0) continue;
            for (int e2 = 0; e2 < a; ++e2) {
                if (sys.edge(e, e2)) next[e2] += v[e];
            }
        }
        v.swap(next);
    }
    BigInt total = 0;
    for (int e = 0; e < a; ++e) {
        if (sys.may_precede_suffix(e)) total += v[e];
    }
    return total;
}

std::vector<Word> enumerate_words(int n, const System& sys) {
    if (n < 1) fail("letter_out_of_range", "word length must be >= 1, got " + std::to_string(n));
    if (n > 14) fail("n_too_large", "enumerate_words capped at length 14, got " + std::to_string(n));
    const int a = sys.letters();
    std::vector<Word> out;
    Word current;
    current.reserve(static_cast<std::size_t>(n));
    // Depth-first in letter order yields lexicographic output.
    auto extend = [&](auto&& self, int depth) -> void {
        if (depth == n) {
            if (sys.may_precede_suffix(current.back())) out.push_back(current);
            return;
        }
        for (int e = 0; e < a; ++e) {
            if (!current.empty() && !sys.edge(current.back(), e)) continue;
            current.push_back(e);
            self(self, depth + 1);
            current.pop_back();
        }
    };
    extend(extend, 0);
    return out;
}

double word_log_contraction(const System& sys, const Word& word) {
    double sum = 0.0;
    for (int e : word) sum += sys.log_ratio(e);
    return sum;
}

} // namespace rcifs
