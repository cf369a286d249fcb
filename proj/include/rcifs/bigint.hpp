#ifndef RCIFS_BIGINT_HPP
#define RCIFS_BIGINT_HPP

// Exact integer arithmetic for the counting backends, plus the one float
// bridge they need: a natural logarithm with near-machine relative accuracy
// regardless of magnitude.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "rcifs/errors.hpp"

namespace rcifs {

using BigInt = boost::multiprecision::cpp_int;

// Natural log of a positive big integer. Takes the top 53 bits as a double
// mantissa and adds bit-length * log 2, so the absolute error is a few
// ulps (~5e-16) independent of how many thousands of bits v has.
inline double log_big(const BigInt& v) {
    if (v <= 0) fail("internal_error", "log_big requires a positive integer");
    const unsigned m = boost::multiprecision::msb(v); // floor(log2 v)
    if (m <= 52) return std::log(v.convert_to<double>());
    const std::uint64_t top = BigInt(v >> (m - 52)).convert_to<std::uint64_t>();
    constexpr double kLn2 = 0.6931471805599453094172321214581766;
    return std::log(static_cast<double>(top)) + static_cast<double>(m - 52) * kLn2;
}

inline std::string decimal(const BigInt& v) { return v.str(); }

} // namespace rcifs

#endif
