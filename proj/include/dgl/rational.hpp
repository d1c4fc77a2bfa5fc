#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace dgl {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact conversion of a decimal literal ("2", "0.5", "12.25") to a rational.
/// Throws std::invalid_argument on anything else.
Rational rational_from_decimal(const std::string& text);

/// Renders a rational as a decimal string when the denominator is 2^a*5^b
/// (so the result reparses to the same value), otherwise as "p/q".
std::string rational_to_string(const Rational& r);

/// True iff the rational has a finite decimal expansion.
bool has_finite_decimal(const Rational& r);

}  // namespace dgl
