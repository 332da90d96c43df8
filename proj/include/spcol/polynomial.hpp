#pragma once

#include "spcol/rational.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace spcol {

/// Polynomial with exact rational coefficients in the monomial basis,
/// ascending degree. The zero polynomial has an empty coefficient list.
class RatPoly {
public:
  RatPoly() = default;
  explicit RatPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

  static RatPoly constant(Rational v) { return RatPoly({v}); }

  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }

  Rational eval(const Rational& x) const
  {
    Rational v{0};
    for (std::size_t k = c_.size(); k-- > 0;) v = v * x + c_[k];
    return v;
  }

  double eval(double x) const
  {
    double v = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) v = v * x + to_double(c_[k]);
    return v;
  }

  RatPoly derivative(int order = 1) const
  {
    RatPoly p = *this;
    for (int o = 0; o < order; ++o) {
      if (p.c_.empty()) break;
      std::vector<Rational> d;
      d.reserve(p.c_.size() > 0 ? p.c_.size() - 1 : 0);
      for (std::size_t k = 1; k < p.c_.size(); ++k)
        d.push_back(p.c_[k] * Rational(static_cast<long long>(k)));
      p.c_ = std::move(d);
    }
    p.trim();
    return p;
  }

  RatPoly antiderivative() const
  {
    std::vector<Rational> a(c_.size() + 1, Rational(0));
    for (std::size_t k = 0; k < c_.size(); ++k)
      a[k + 1] = c_[k] / Rational(static_cast<long long>(k + 1));
    return RatPoly(std::move(a));
  }

  Rational integrate(const Rational& a, const Rational& b) const
  {
    RatPoly F = antiderivative();
    return F.eval(b) - F.eval(a);
  }

  friend RatPoly operator*(const RatPoly& a, const RatPoly& b)
  {
    if (a.is_zero() || b.is_zero()) return RatPoly{};
    std::vector<Rational> p(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j)
        p[i + j] += a.c_[i] * b.c_[j];
    return RatPoly(std::move(p));
  }

  friend RatPoly operator+(const RatPoly& a, const RatPoly& b)
  {
    std::vector<Rational> p(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) p[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) p[i] += b.c_[i];
    return RatPoly(std::move(p));
  }

  friend RatPoly operator-(const RatPoly& a, const RatPoly& b)
  {
    std::vector<Rational> p(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) p[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) p[i] -= b.c_[i];
    return RatPoly(std::move(p));
  }

private:
  void trim()
  {
    while (!c_.empty() && c_.back() == Rational(0)) c_.pop_back();
  }

  std::vector<Rational> c_;
};

/// Real roots of p inside (a,b), found by sign-change bracketing on a fine
/// partition plus bisection. Sufficient for the low-degree basis polynomials
/// whose L1/Linf norms need piecewise sign analysis.
std::vector<double> roots_in_interval(const RatPoly& p, double a, double b,
                                      int scan_points = 4096);

/// ∫_a^b |p| via exact antiderivative evaluated between sign changes.
double integral_abs(const RatPoly& p, double a, double b);

/// max_{[a,b]} |p| via the critical points of p.
double max_abs(const RatPoly& p, double a, double b);

} // namespace spcol
