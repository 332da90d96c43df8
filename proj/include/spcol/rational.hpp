#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace spcol {

/// Exact rational scalar used for all point locations, basis coefficients
/// and transform tables. Kept canonical (gcd-reduced, positive denominator)
/// by boost::rational.
using Rational = boost::rational<long long>;

inline double to_double(const Rational& r)
{
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rational& r)
{
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

} // namespace spcol
