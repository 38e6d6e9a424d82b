#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace toeplab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact conversion: every finite double is a dyadic rational.
Rational rational_from_double(double x);

/// Parses "3/4", "-2", "0.25" or "1e-3" (decimal strings are read exactly).
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& r);

Integer lcm_of_denominators(const RationalVector& v);

/// Floor of a rational as a checked 64-bit integer.
std::int64_t floor_to_int64(const Rational& r);

}  // namespace toeplab
