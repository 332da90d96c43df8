#pragma once

#include "spcol/family.hpp"

#include <functional>
#include <vector>

namespace spcol {

/// f^(l) at a tagged point location.
using Sampler1D = std::function<double(const SidedPoint&, int deriv)>;

/// Level-indexed storage shared by point values and hierarchical surpluses.
/// Level n holds one dense block per cell j (1 cell for n in {-1,0},
/// 2^{n-1} for n >= 1), ordered (j, i, l); level -1 (corrected mode only)
/// is a single scalar.
class Grid1D {
public:
  Grid1D(FamilyPtr family, int N, bool corrected);

  const FamilyPtr& family() const { return fam_; }
  int N() const { return N_; }
  bool corrected() const { return corrected_; }
  int min_level() const { return corrected_ ? -1 : 0; }

  long long cells(int n) const { return n >= 1 ? 1LL << (n - 1) : 1; }
  int block_size(int n) const { return n == -1 ? 1 : fam_->block_size(); }

  double& at(int n, long long j, int i, int l)
  {
    return lv_[n - min_level()][j * block_size(n) + (n == -1 ? 0 : fam_->idx(i, l))];
  }
  double at(int n, long long j, int i, int l) const
  {
    return lv_[n - min_level()][j * block_size(n) + (n == -1 ? 0 : fam_->idx(i, l))];
  }
  std::vector<double>& level(int n) { return lv_[n - min_level()]; }
  const std::vector<double>& level(int n) const { return lv_[n - min_level()]; }

private:
  FamilyPtr fam_;
  int N_;
  bool corrected_;
  std::vector<std::vector<double>> lv_;
};

struct ValueGrid1D : Grid1D {
  using Grid1D::Grid1D;
};
struct Surplus1D : Grid1D {
  using Grid1D::Grid1D;
};

/// Fills a ValueGrid1D by sampling f^(l) at every nested point up to level N.
ValueGrid1D sample_grid(const Sampler1D& f, FamilyPtr family, int N, bool corrected);

/// Descending pyramid: point/derivative values to hierarchical surpluses.
Surplus1D values_to_surplus(const ValueGrid1D& g);
/// Ascending pyramid, the exact inverse of values_to_surplus.
ValueGrid1D surplus_to_values(const Surplus1D& s);

/// Corrected variants with the level "-1" constant block; the n = -1, 0
/// parts replace the plain level-0 pass, levels >= 1 are unchanged.
Surplus1D values_to_surplus_corrected(const ValueGrid1D& g);
ValueGrid1D surplus_to_values_corrected(const Surplus1D& s);

/// d^deriv/dx^deriv of the hierarchical interpolant at x, visiting one cell
/// per level. The plain-double overload uses the right-limit convention
/// (left limit at x = 1); the sided overload honors the tag.
double eval_interp_1d(const Surplus1D& s, double x, int deriv = 0);
double eval_interp_1d(const Surplus1D& s, const SidedPoint& x, int deriv = 0);

/// Integral over [0,1] of the interpolant: sum of quadrature weights times
/// surpluses.
double integrate_1d(const Surplus1D& s);

} // namespace spcol
