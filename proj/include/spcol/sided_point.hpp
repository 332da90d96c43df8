#pragma once

#include "spcol/rational.hpp"

#include <compare>
#include <string>

namespace spcol {

/// Limit direction for a collocation point sitting on a cell interface.
/// Interior points (e.g. 1/3) never lie on a dyadic interface and carry
/// Side::interior.
enum class Side : int { left = -1, interior = 0, right = 1 };

struct SidedPoint {
  Rational loc{0};
  Side side = Side::interior;

  double value() const { return to_double(loc); }

  friend bool operator==(const SidedPoint&, const SidedPoint&) = default;

  friend bool operator<(const SidedPoint& a, const SidedPoint& b)
  {
    if (a.loc != b.loc) return a.loc < b.loc;
    return static_cast<int>(a.side) < static_cast<int>(b.side);
  }
};

inline std::string to_string(const SidedPoint& p)
{
  std::string s = to_string(p.loc);
  if (p.side == Side::left) s += "-";
  if (p.side == Side::right) s += "+";
  return s;
}

/// Affine image (k + p) / 2^n of a sided point; positive scaling preserves
/// the limit direction.
inline SidedPoint scale_shift(const SidedPoint& p, long long k, int n)
{
  Rational loc = (Rational(k) + p.loc) / Rational(1LL << n);
  return {loc, p.side};
}

/// 2*p - h, the inverse of the halving map onto level n+1.
inline SidedPoint double_shift(const SidedPoint& p, int h)
{
  return {Rational(2) * p.loc - Rational(h), p.side};
}

} // namespace spcol
