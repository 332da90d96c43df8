#include "spcol/transform1d.hpp"

#include <cmath>
#include <stdexcept>

namespace spcol {

namespace {

// Values of the full level-n grid (2^n cells, one block per cell) assembled
// from the full level-(n-1) grid and the level-n increment values. The same
// physical point keeps the same derivative values, so assembly is a copy.
std::vector<double> assemble_full(const NestedFamily& fam, const std::vector<double>& coarse,
                                  const std::vector<double>& increment, int n)
{
  const int nb = fam.block_size();
  const long long half_cells = 1LL << (n - 1);
  std::vector<double> fine(2 * half_cells * nb);
  for (long long j = 0; j < half_cells; ++j)
    for (int h = 0; h < 2; ++h)
      for (int i = 0; i <= fam.P(); ++i)
        for (int l = 0; l <= fam.M(); ++l) {
          double v;
          if (int i0 = fam.from_parent(h, i); i0 >= 0)
            v = coarse[j * nb + fam.idx(i0, l)];
          else
            v = increment[j * nb + fam.idx(fam.from_increment(h, i), l)];
          fine[(2 * j + h) * nb + fam.idx(i, l)] = v;
        }
  return fine;
}

// One level of the descending/ascending pyramid: out = in -/+ prediction
// from the coarse full grid, with the 2^{(n-1)(l-l')} derivative rescale.
void pyramid_level(const NestedFamily& fam, const std::vector<double>& coarse,
                   const std::vector<double>& in, std::vector<double>& out, int n, double sign)
{
  const int nb = fam.block_size();
  const long long half_cells = 1LL << (n - 1);
  out.resize(in.size());
  for (long long j = 0; j < half_cells; ++j)
    for (int i = 0; i <= fam.P(); ++i)
      for (int l = 0; l <= fam.M(); ++l) {
        double pred = 0;
        for (int ip = 0; ip <= fam.P(); ++ip)
          for (int lp = 0; lp <= fam.M(); ++lp)
            pred += std::ldexp(coarse[j * nb + fam.idx(ip, lp)], (n - 1) * (l - lp)) *
                    fam.transform_table_d(i, l, ip, lp);
        out[j * nb + fam.idx(i, l)] = in[j * nb + fam.idx(i, l)] + sign * pred;
      }
}

} // namespace

Grid1D::Grid1D(FamilyPtr family, int N, bool corrected)
    : fam_(std::move(family)), N_(N), corrected_(corrected)
{
  if (N_ < 0) throw std::invalid_argument("max level must be >= 0");
  for (int n = min_level(); n <= N_; ++n)
    lv_.push_back(std::vector<double>(cells(n) * block_size(n), 0.0));
}

ValueGrid1D sample_grid(const Sampler1D& f, FamilyPtr family, int N, bool corrected)
{
  ValueGrid1D g(family, N, corrected);
  const NestedFamily& fam = *g.family();
  if (corrected) g.at(-1, 0, 0, 0) = f(fam.point_location(-1, 0, 0), 0);
  for (int n = 0; n <= N; ++n)
    for (long long j = 0; j < g.cells(n); ++j)
      for (int i = 0; i <= fam.P(); ++i) {
        SidedPoint x = fam.point_location(n, j, i);
        for (int l = 0; l <= fam.M(); ++l) g.at(n, j, i, l) = f(x, l);
      }
  return g;
}

namespace {

// Shared pyramid body; level 0 of `s` must already hold the full level-0
// values when descending (or surpluses when ascending).
void sweep(const Grid1D& in, Grid1D& out, bool descending)
{
  const NestedFamily& fam = *in.family();
  std::vector<double> full = descending ? in.level(0) : out.level(0);
  for (int n = 1; n <= in.N(); ++n) {
    pyramid_level(fam, full, in.level(n), out.level(n), n, descending ? -1.0 : 1.0);
    full = assemble_full(fam, full, descending ? in.level(n) : out.level(n), n);
  }
}

} // namespace

Surplus1D values_to_surplus(const ValueGrid1D& g)
{
  if (g.corrected()) throw std::invalid_argument("grid is in corrected mode");
  Surplus1D s(g.family(), g.N(), false);
  s.level(0) = g.level(0);
  sweep(g, s, true);
  return s;
}

ValueGrid1D surplus_to_values(const Surplus1D& s)
{
  if (s.corrected()) throw std::invalid_argument("surplus is in corrected mode");
  ValueGrid1D g(s.family(), s.N(), false);
  g.level(0) = s.level(0);
  sweep(s, g, false);
  return g;
}

Surplus1D values_to_surplus_corrected(const ValueGrid1D& g)
{
  if (!g.corrected()) throw std::invalid_argument("grid is not in corrected mode");
  const NestedFamily& fam = *g.family();
  Surplus1D s(g.family(), g.N(), true);
  double c = g.at(-1, 0, 0, 0);
  s.at(-1, 0, 0, 0) = c;
  for (int i = 0; i <= fam.P(); ++i)
    for (int l = 0; l <= fam.M(); ++l) {
      if (l == 0)
        s.at(0, 0, i, 0) = i == fam.istar() ? 0.0 : g.at(0, 0, i, 0) - c;
      else
        s.at(0, 0, i, l) = g.at(0, 0, i, l);
    }
  sweep(g, s, true);
  return s;
}

ValueGrid1D surplus_to_values_corrected(const Surplus1D& s)
{
  if (!s.corrected()) throw std::invalid_argument("surplus is not in corrected mode");
  const NestedFamily& fam = *s.family();
  ValueGrid1D g(s.family(), s.N(), true);
  double c = s.at(-1, 0, 0, 0);
  g.at(-1, 0, 0, 0) = c;
  for (int i = 0; i <= fam.P(); ++i)
    for (int l = 0; l <= fam.M(); ++l) {
      if (l == 0)
        g.at(0, 0, i, 0) = i == fam.istar() ? c : s.at(0, 0, i, 0) + c;
      else
        g.at(0, 0, i, l) = s.at(0, 0, i, l);
    }
  sweep(s, g, false);
  return g;
}

double eval_interp_1d(const Surplus1D& s, double x, int deriv)
{
  const NestedFamily& fam = *s.family();
  double acc = 0.0;
  if (s.corrected() && deriv == 0) acc += s.at(-1, 0, 0, 0);
  for (int i = 0; i <= fam.P(); ++i)
    for (int l = 0; l <= fam.M(); ++l)
      acc += s.at(0, 0, i, l) *
             fam.eval_basis(NestedFamily::Kind::scaling, i, l, deriv, 0, 0, x);
  for (int n = 1; n <= s.N(); ++n) {
    long long j = std::min(static_cast<long long>(std::floor(std::ldexp(x, n - 1))),
                           s.cells(n) - 1);
    j = std::max(j, 0LL);
    for (int i = 0; i <= fam.P(); ++i)
      for (int l = 0; l <= fam.M(); ++l)
        acc += s.at(n, j, i, l) *
               fam.eval_basis(NestedFamily::Kind::wavelet, i, l, deriv, n, j, x);
  }
  return acc;
}

double eval_interp_1d(const Surplus1D& s, const SidedPoint& x, int deriv)
{
  const NestedFamily& fam = *s.family();
  double acc = 0.0;
  if (s.corrected() && deriv == 0) acc += s.at(-1, 0, 0, 0);
  for (int i = 0; i <= fam.P(); ++i)
    for (int l = 0; l <= fam.M(); ++l)
      acc += s.at(0, 0, i, l) *
             fam.eval_basis(NestedFamily::Kind::scaling, i, l, deriv, 0, 0, x);
  for (int n = 1; n <= s.N(); ++n) {
    Rational t = x.loc * Rational(1LL << (n - 1));
    long long j = t.numerator() >= 0 ? t.numerator() / t.denominator() : 0;
    if (Rational(j) == t && x.side == Side::left) --j;
    j = std::clamp(j, 0LL, s.cells(n) - 1);
    for (int i = 0; i <= fam.P(); ++i)
      for (int l = 0; l <= fam.M(); ++l)
        acc += s.at(n, j, i, l) *
               fam.eval_basis(NestedFamily::Kind::wavelet, i, l, deriv, n, j, x);
  }
  return acc;
}

double integrate_1d(const Surplus1D& s)
{
  const NestedFamily& fam = *s.family();
  double acc = 0.0;
  if (s.corrected()) acc += s.at(-1, 0, 0, 0);
  for (int i = 0; i <= fam.P(); ++i)
    for (int l = 0; l <= fam.M(); ++l) {
      acc += s.at(0, 0, i, l) * to_double(fam.quad_phi(i, l));
      double w = to_double(fam.quad_psi(i, l));
      for (int n = 1; n <= s.N(); ++n) {
        double scale = std::ldexp(1.0, -(l + 1) * (n - 1));
        double sum = 0.0;
        for (long long j = 0; j < s.cells(n); ++j) sum += s.at(n, j, i, l);
        acc += scale * w * sum;
      }
    }
  return acc;
}

} // namespace spcol
