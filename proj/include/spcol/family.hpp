#pragma once

#include "spcol/polynomial.hpp"
#include "spcol/rational.hpp"
#include "spcol/sided_point.hpp"

#include <array>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spcol {

struct FamilyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BasisNorms {
  double l1 = 0, l2 = 0, linf = 0;
};

/// One hierarchical basis function: a polynomial supported on the open half
/// cell (half/2, (half+1)/2) of the unit interval, zero elsewhere.
struct WaveletPiece {
  int half = 0; // 0 -> (0,1/2), 1 -> (1/2,1)
  RatPoly poly;
};

/// A nested collocation family on [0,1]: P+1 points per cell, values plus
/// the first M derivatives interpolated at each point. Immutable after
/// construction; all tables exact rationals.
class NestedFamily {
public:
  /// Builds from level-0 anchors; throws FamilyError if the anchors are not
  /// nested, are duplicated, or the interpolation problem is singular.
  NestedFamily(std::string id, int P, int M, std::vector<SidedPoint> anchors0, int istar = 0);

  const std::string& id() const { return id_; }
  int P() const { return P_; }
  int M() const { return M_; }
  int K() const { return K_; }
  int istar() const { return istar_; }
  int block_size() const { return K_ + 1; } // (P+1)(M+1)

  const std::vector<SidedPoint>& anchors0() const { return anchors0_; }
  const std::vector<SidedPoint>& anchors1() const { return anchors1_; }

  /// child_map[i] = (half, r) with 2*anchors0[i] = half + anchors0[r].
  const std::vector<std::pair<int, int>>& child_map() const { return child_map_; }

  /// Full-grid assembly: the level-n point (cell 2j+half, index i) equals
  /// either the level-(n-1) full-grid point (cell j, from_parent) or the
  /// level-n increment point (cell j, from_increment). Exactly one is >= 0.
  int from_parent(int half, int i) const { return from_parent_[half][i]; }
  int from_increment(int half, int i) const { return from_increment_[half][i]; }

  const RatPoly& phi(int i, int l) const { return phi_[idx(i, l)]; }
  const WaveletPiece& psi(int i, int l) const { return psi_[idx(i, l)]; }

  /// transform_table(i,l,ip,lp) = d^l/dx^l phi_{ip,lp} at anchors1[i].
  const Rational& transform_table(int i, int l, int ip, int lp) const
  {
    return table_[(idx(i, l) * (K_ + 1)) + idx(ip, lp)];
  }
  double transform_table_d(int i, int l, int ip, int lp) const
  {
    return table_d_[(idx(i, l) * (K_ + 1)) + idx(ip, lp)];
  }

  const Rational& quad_phi(int i, int l) const { return quad_phi_[idx(i, l)]; }
  const Rational& quad_psi(int i, int l) const { return quad_psi_[idx(i, l)]; }

  const BasisNorms& norms_phi(int i, int l) const { return norms_phi_[idx(i, l)]; }
  const BasisNorms& norms_psi(int i, int l) const { return norms_psi_[idx(i, l)]; }

  /// Location of the nested point x~^j_{i,n}: level -1 is the single root
  /// anchor, level 0 the anchors0, level n>=1 the scaled anchors1.
  SidedPoint point_location(int n, long long j, int i) const;

  enum class Kind { scaling, wavelet };

  /// Derivative `deriv` of the scaled basis at plain x with the right-limit
  /// convention on interior interfaces (left-limit at x = 1).
  double eval_basis(Kind kind, int i, int l, int deriv, int n, long long j, double x) const;

  /// Side-aware evaluation at an exact rational location.
  double eval_basis(Kind kind, int i, int l, int deriv, int n, long long j,
                    const SidedPoint& x) const;

  /// Norms of the level-n hierarchical basis on [0,1]; n = 0 returns the
  /// scaling-basis norms, n >= 1 the scaled wavelet norms.
  BasisNorms psi_norm(int i, int l, int n) const;

  /// Structured-text dump: anchors, child map, polynomial coefficients,
  /// transform table and quadrature weights, rationals as "num/den".
  void dump(std::ostream& os) const;

  int idx(int i, int l) const { return i * (M_ + 1) + l; }

private:
  void build_polynomials();
  void build_tables();
  void verify_duality() const;

  std::string id_;
  int P_, M_, K_, istar_;
  std::vector<SidedPoint> anchors0_, anchors1_;
  std::vector<std::pair<int, int>> child_map_;
  std::array<std::vector<int>, 2> from_parent_, from_increment_;
  std::vector<RatPoly> phi_;
  std::vector<WaveletPiece> psi_;
  std::vector<Rational> table_;
  std::vector<double> table_d_;
  std::vector<Rational> quad_phi_, quad_psi_;
  std::vector<BasisNorms> norms_phi_, norms_psi_;
};

using FamilyPtr = std::shared_ptr<const NestedFamily>;

/// Number of nested anchor-set types for a given P (binomial identity with
/// the convention C(N,n) = 0 for n < 0 and 1 for n in {0, N}).
long long lemma1_count(int P);

/// Brute-force enumeration of all valid sided anchor sets for P <= 3.
std::vector<std::vector<SidedPoint>> enumerate_anchor_sets(int P);

/// Built-in catalogue: k0-t1, k0-t2, p0m1-t1, p0m1-t2, p1m0-t1..t4,
/// p2m0, p3m0, p1m1.
FamilyPtr make_family(const std::string& id);
std::vector<std::string> catalogue_ids();

} // namespace spcol
