#pragma once

// Exact arbitrary-precision rationals used for Dirichlet hyperparameters and
// posterior-mean probabilities. Values are always kept in lowest terms.

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ceg {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses "p/q", "p" or "-p/q" with decimal digits only. Throws
// std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

// Formats as "p/q", or "p" when the denominator is 1.
std::string format_rational(const Rational& value);

double to_double(const Rational& value);

// Fixed-point decimal rendering, rounded half away from zero.
std::string format_decimal(const Rational& value, int places);
std::string format_decimal(double value, int places);

}  // namespace ceg
