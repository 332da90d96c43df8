#include "spcol/polynomial.hpp"

#include <algorithm>

namespace spcol {

std::vector<double> roots_in_interval(const RatPoly& p, double a, double b, int scan_points)
{
  std::vector<double> roots;
  if (p.degree() <= 0) return roots;
  double prev_x = a, prev_v = p.eval(a);
  for (int k = 1; k <= scan_points; ++k) {
    double x = a + (b - a) * k / scan_points;
    double v = p.eval(x);
    if (prev_v == 0.0) {
      roots.push_back(prev_x);
    } else if (v != 0.0 && std::signbit(v) != std::signbit(prev_v)) {
      double lo = prev_x, hi = x;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double vm = p.eval(mid);
        if (vm == 0.0) { lo = hi = mid; break; }
        if (std::signbit(vm) == std::signbit(p.eval(lo))) lo = mid; else hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_v = v;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double integral_abs(const RatPoly& p, double a, double b)
{
  RatPoly F = p.antiderivative();
  std::vector<double> cuts = roots_in_interval(p, a, b);
  cuts.insert(cuts.begin(), a);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    total += std::abs(F.eval(cuts[k + 1]) - F.eval(cuts[k]));
  return total;
}

double max_abs(const RatPoly& p, double a, double b)
{
  double m = std::max(std::abs(p.eval(a)), std::abs(p.eval(b)));
  for (double r : roots_in_interval(p.derivative(), a, b))
    m = std::max(m, std::abs(p.eval(r)));
  return m;
}

} // namespace spcol
