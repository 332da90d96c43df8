#include "spcol/family.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace spcol {

namespace {

// p(a*x + b), exact.
RatPoly compose_affine(const RatPoly& p, const Rational& a, const Rational& b)
{
  RatPoly result;
  RatPoly arg({b, a});
  RatPoly pow = RatPoly::constant(Rational(1));
  for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
    result = result + pow * RatPoly::constant(p.coeffs()[k]);
    pow = pow * arg;
  }
  return result;
}

bool is_dyadic(const Rational& r)
{
  long long d = r.denominator();
  while (d % 2 == 0) d /= 2;
  return d == 1;
}

// Solves A c = rhs by exact Gaussian elimination with partial (nonzero)
// pivoting. Returns false if singular.
bool solve_exact(std::vector<std::vector<Rational>> A, std::vector<Rational> rhs,
                 std::vector<Rational>& out)
{
  const int n = static_cast<int>(A.size());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (A[r][col] != Rational(0)) {
        piv = r;
        break;
      }
    if (piv < 0) return false;
    std::swap(A[col], A[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = col + 1; r < n; ++r) {
      if (A[r][col] == Rational(0)) continue;
      Rational f = A[r][col] / A[col][col];
      for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  out.assign(n, Rational(0));
  for (int r = n - 1; r >= 0; --r) {
    Rational s = rhs[r];
    for (int c = r + 1; c < n; ++c) s -= A[r][c] * out[c];
    out[r] = s / A[r][r];
  }
  return true;
}

// d^l/dx^l x^k evaluated at x, as a rational.
Rational monomial_deriv(int k, int l, const Rational& x)
{
  if (l > k) return Rational(0);
  long long f = 1;
  for (int t = 0; t < l; ++t) f *= (k - t);
  Rational v(f);
  for (int t = 0; t < k - l; ++t) v *= x;
  return v;
}

BasisNorms norms_on(const RatPoly& p, const Rational& a, const Rational& b)
{
  BasisNorms n;
  n.l1 = integral_abs(p, to_double(a), to_double(b));
  n.l2 = std::sqrt(to_double((p * p).integrate(a, b)));
  n.linf = max_abs(p, to_double(a), to_double(b));
  return n;
}

} // namespace

NestedFamily::NestedFamily(std::string id, int P, int M, std::vector<SidedPoint> anchors0,
                           int istar)
    : id_(std::move(id)), P_(P), M_(M), K_((P + 1) * (M + 1) - 1), istar_(istar),
      anchors0_(std::move(anchors0))
{
  if (P_ < 0 || M_ < 0) throw FamilyError("P and M must be nonnegative");
  if (static_cast<int>(anchors0_.size()) != P_ + 1)
    throw FamilyError("need P+1 level-0 anchors");
  if (istar_ < 0 || istar_ > P_) throw FamilyError("istar out of range");

  std::sort(anchors0_.begin(), anchors0_.end());
  for (std::size_t i = 0; i + 1 < anchors0_.size(); ++i)
    if (anchors0_[i] == anchors0_[i + 1]) throw FamilyError("duplicate anchor");
  for (const auto& a : anchors0_) {
    if (a.loc < Rational(0) || a.loc > Rational(1))
      throw FamilyError("anchor outside [0,1]");
    bool dyadic = is_dyadic(a.loc);
    if (dyadic && a.side == Side::interior)
      throw FamilyError("dyadic anchor needs a limit side");
    if (!dyadic && a.side != Side::interior)
      throw FamilyError("non-dyadic anchor cannot carry a limit side");
    if (a.loc == Rational(0) && a.side != Side::right)
      throw FamilyError("anchor at 0 must be a right limit");
    if (a.loc == Rational(1) && a.side != Side::left)
      throw FamilyError("anchor at 1 must be a left limit");
  }

  // Nesting: every anchor must be the image (h + x_r)/2 of some anchor.
  std::vector<SidedPoint> level1;
  for (int h = 0; h < 2; ++h)
    for (const auto& a : anchors0_) level1.push_back(scale_shift(a, h, 1));
  std::sort(level1.begin(), level1.end());

  child_map_.assign(P_ + 1, {-1, -1});
  for (int i = 0; i <= P_; ++i) {
    for (int h = 0; h < 2; ++h) {
      SidedPoint up = double_shift(anchors0_[i], h);
      auto it = std::find(anchors0_.begin(), anchors0_.end(), up);
      if (it != anchors0_.end()) {
        child_map_[i] = {h, static_cast<int>(it - anchors0_.begin())};
        break;
      }
    }
    if (child_map_[i].second < 0) throw FamilyError("anchors are not nested");
  }

  for (const auto& p : level1)
    if (std::find(anchors0_.begin(), anchors0_.end(), p) == anchors0_.end())
      anchors1_.push_back(p);
  if (static_cast<int>(anchors1_.size()) != P_ + 1)
    throw FamilyError("level-1 increment must contain exactly P+1 points");

  // For each level-n point (cell 2j+h, i) decide whether it comes from the
  // parent full grid or from the increment grid of the same level.
  for (int h = 0; h < 2; ++h) {
    from_parent_[h].assign(P_ + 1, -1);
    from_increment_[h].assign(P_ + 1, -1);
    for (int i = 0; i <= P_; ++i) {
      SidedPoint y = scale_shift(anchors0_[i], h, 1);
      auto it = std::find(anchors0_.begin(), anchors0_.end(), y);
      auto jt = std::find(anchors1_.begin(), anchors1_.end(), y);
      from_parent_[h][i] = it != anchors0_.end() ? static_cast<int>(it - anchors0_.begin()) : -1;
      from_increment_[h][i] = jt != anchors1_.end() ? static_cast<int>(jt - anchors1_.begin()) : -1;
      if ((from_parent_[h][i] < 0) == (from_increment_[h][i] < 0))
        throw FamilyError("refined point must match exactly one source grid");
    }
  }

  build_polynomials();
  build_tables();
  verify_duality();
}

void NestedFamily::build_polynomials()
{
  const int nb = K_ + 1;
  std::vector<std::vector<Rational>> A(nb, std::vector<Rational>(nb));
  for (int ip = 0; ip <= P_; ++ip)
    for (int lp = 0; lp <= M_; ++lp)
      for (int k = 0; k < nb; ++k)
        A[idx(ip, lp)][k] = monomial_deriv(k, lp, anchors0_[ip].loc);

  phi_.resize(nb);
  for (int i = 0; i <= P_; ++i)
    for (int l = 0; l <= M_; ++l) {
      std::vector<Rational> rhs(nb, Rational(0));
      rhs[idx(i, l)] = Rational(1);
      std::vector<Rational> c;
      if (!solve_exact(A, rhs, c))
        throw FamilyError("singular interpolation system for " + id_);
      phi_[idx(i, l)] = RatPoly(std::move(c));
    }

  psi_.resize(nb);
  for (int i = 0; i <= P_; ++i) {
    int half = -1, r = -1;
    for (int h = 0; h < 2 && half < 0; ++h) {
      SidedPoint up = double_shift(anchors1_[i], h);
      auto it = std::find(anchors0_.begin(), anchors0_.end(), up);
      if (it != anchors0_.end()) {
        half = h;
        r = static_cast<int>(it - anchors0_.begin());
      }
    }
    if (half < 0) throw FamilyError("increment point has no parent anchor");
    Rational scale(1);
    for (int l = 0; l <= M_; ++l) {
      // 2^{-l} phi_{r,l}(2x - half): unit dual derivatives at anchors1[i],
      // all derivatives through M vanish on the level-0 anchors.
      psi_[idx(i, l)] = {half, compose_affine(phi_[idx(r, l)], Rational(2), Rational(-half)) *
                                   RatPoly::constant(scale)};
      scale /= 2;
    }
  }
}

void NestedFamily::build_tables()
{
  const int nb = K_ + 1;
  table_.assign(nb * nb, Rational(0));
  table_d_.assign(nb * nb, 0.0);
  for (int i = 0; i <= P_; ++i)
    for (int l = 0; l <= M_; ++l)
      for (int ip = 0; ip <= P_; ++ip)
        for (int lp = 0; lp <= M_; ++lp) {
          Rational v = phi_[idx(ip, lp)].derivative(l).eval(anchors1_[i].loc);
          table_[idx(i, l) * nb + idx(ip, lp)] = v;
          table_d_[idx(i, l) * nb + idx(ip, lp)] = to_double(v);
        }

  quad_phi_.resize(nb);
  quad_psi_.resize(nb);
  norms_phi_.resize(nb);
  norms_psi_.resize(nb);
  for (int i = 0; i <= P_; ++i)
    for (int l = 0; l <= M_; ++l) {
      quad_phi_[idx(i, l)] = phi_[idx(i, l)].integrate(Rational(0), Rational(1));
      const auto& w = psi_[idx(i, l)];
      Rational lo = Rational(w.half) / 2, hi = Rational(w.half + 1) / 2;
      quad_psi_[idx(i, l)] = w.poly.integrate(lo, hi);
      norms_phi_[idx(i, l)] = norms_on(phi_[idx(i, l)], Rational(0), Rational(1));
      norms_psi_[idx(i, l)] = norms_on(w.poly, lo, hi);
    }
}

void NestedFamily::verify_duality() const
{
  for (int i = 0; i <= P_; ++i)
    for (int l = 0; l <= M_; ++l) {
      for (int ip = 0; ip <= P_; ++ip)
        for (int lp = 0; lp <= M_; ++lp) {
          Rational want((i == ip && l == lp) ? 1 : 0);
          if (phi_[idx(i, l)].derivative(lp).eval(anchors0_[ip].loc) != want)
            throw FamilyError("scaling duality failed for " + id_);
          // Wavelets vanish to order M on the level-0 anchors and are dual
          // at the increment points.
          const auto& w = psi_[idx(i, l)];
          Rational lo = Rational(w.half) / 2, hi = Rational(w.half + 1) / 2;
          auto in_support = [&](const SidedPoint& p) {
            if (p.loc > lo && p.loc < hi) return true;
            if (p.loc == lo && p.side == Side::right) return true;
            if (p.loc == hi && p.side == Side::left) return true;
            return false;
          };
          Rational at_anchor = in_support(anchors0_[ip])
                                   ? w.poly.derivative(lp).eval(anchors0_[ip].loc)
                                   : Rational(0);
          if (at_anchor != Rational(0))
            throw FamilyError("wavelet does not vanish on coarse anchors for " + id_);
          Rational at_inc = in_support(anchors1_[ip])
                                ? w.poly.derivative(lp).eval(anchors1_[ip].loc)
                                : Rational(0);
          if (at_inc != want) throw FamilyError("wavelet duality failed for " + id_);
        }
    }
}

SidedPoint NestedFamily::point_location(int n, long long j, int i) const
{
  if (n == -1) return anchors0_[istar_];
  if (n == 0) return anchors0_[i];
  return scale_shift(anchors1_[i], j, n - 1);
}

namespace {

// Membership of a sided coordinate in [lo,hi] (scaling) or the open half
// cell (lo,hi) (wavelet); on either level the side tag resolves interface
// points exactly.
bool sided_in(const Rational& t, Side side, const Rational& lo, const Rational& hi)
{
  if (t > lo && t < hi) return true;
  if (t == lo && side != Side::left) return true;
  if (t == hi && side == Side::left) return true;
  return false;
}

} // namespace

double NestedFamily::eval_basis(Kind kind, int i, int l, int deriv, int n, long long j,
                                double x) const
{
  if (n < 0) return deriv == 0 && x >= 0.0 && x <= 1.0 ? 1.0 : 0.0;
  if (kind == Kind::scaling) {
    double scale = std::ldexp(1.0, n * (deriv - l));
    double t = std::ldexp(x, n) - static_cast<double>(j);
    bool in = (t >= 0.0 && t < 1.0) || (t == 1.0 && x == 1.0);
    return in ? scale * phi_[idx(i, l)].derivative(deriv).eval(t) : 0.0;
  }
  if (n == 0) return eval_basis(Kind::scaling, i, l, deriv, 0, 0, x);
  const auto& w = psi_[idx(i, l)];
  double scale = std::ldexp(1.0, (n - 1) * (deriv - l));
  double t = std::ldexp(x, n - 1) - static_cast<double>(j);
  double lo = 0.5 * w.half, hi = 0.5 * (w.half + 1);
  bool in = (t >= lo && t < hi) || (t == hi && x == 1.0);
  return in ? scale * w.poly.derivative(deriv).eval(t) : 0.0;
}

double NestedFamily::eval_basis(Kind kind, int i, int l, int deriv, int n, long long j,
                                const SidedPoint& x) const
{
  if (n < 0)
    return deriv == 0 && x.loc >= Rational(0) && x.loc <= Rational(1) ? 1.0 : 0.0;
  if (kind == Kind::scaling) {
    Rational t = x.loc * Rational(1LL << n) - Rational(j);
    if (!sided_in(t, x.side, Rational(0), Rational(1))) return 0.0;
    double scale = std::ldexp(1.0, n * (deriv - l));
    return scale * to_double(phi_[idx(i, l)].derivative(deriv).eval(t));
  }
  if (n == 0) return eval_basis(Kind::scaling, i, l, deriv, 0, 0, x);
  const auto& w = psi_[idx(i, l)];
  Rational t = x.loc * Rational(1LL << (n - 1)) - Rational(j);
  Rational lo = Rational(w.half) / 2, hi = Rational(w.half + 1) / 2;
  if (!sided_in(t, x.side, lo, hi)) return 0.0;
  double scale = std::ldexp(1.0, (n - 1) * (deriv - l));
  return scale * to_double(w.poly.derivative(deriv).eval(t));
}

BasisNorms NestedFamily::psi_norm(int i, int l, int n) const
{
  if (n < 0) return {1.0, 1.0, 1.0};
  if (n == 0) return norms_phi_[idx(i, l)];
  const BasisNorms& b = norms_psi_[idx(i, l)];
  double s = std::ldexp(1.0, -l * (n - 1));
  return {s * std::ldexp(b.l1, -(n - 1)), s * std::ldexp(b.l2, 0) * std::exp2(-0.5 * (n - 1)),
          s * b.linf};
}

void NestedFamily::dump(std::ostream& os) const
{
  os << "family " << id_ << " P=" << P_ << " M=" << M_ << " K=" << K_ << " istar=" << istar_
     << "\n";
  os << "anchors0:";
  for (const auto& a : anchors0_) os << " " << to_string(a);
  os << "\nanchors1:";
  for (const auto& a : anchors1_) os << " " << to_string(a);
  os << "\nchild_map:";
  for (const auto& [h, r] : child_map_) os << " (" << h << "," << r << ")";
  os << "\n";
  auto poly_str = [](const RatPoly& p) {
    std::ostringstream ss;
    if (p.is_zero()) {
      ss << "0";
      return ss.str();
    }
    for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
      if (k) ss << " ";
      ss << to_string(p.coeffs()[k]);
    }
    return ss.str();
  };
  for (int i = 0; i <= P_; ++i)
    for (int l = 0; l <= M_; ++l)
      os << "phi[" << i << "][" << l << "]: " << poly_str(phi_[idx(i, l)]) << "\n";
  for (int i = 0; i <= P_; ++i)
    for (int l = 0; l <= M_; ++l) {
      const auto& w = psi_[idx(i, l)];
      os << "psi[" << i << "][" << l << "] half=" << w.half << ": " << poly_str(w.poly)
         << "\n";
    }
  for (int i = 0; i <= P_; ++i)
    for (int l = 0; l <= M_; ++l) {
      os << "T[" << i << "][" << l << "]:";
      for (int ip = 0; ip <= P_; ++ip)
        for (int lp = 0; lp <= M_; ++lp)
          os << " " << to_string(transform_table(i, l, ip, lp));
      os << "\n";
    }
  for (int i = 0; i <= P_; ++i)
    for (int l = 0; l <= M_; ++l)
      os << "quad[" << i << "][" << l << "]: phi=" << to_string(quad_phi_[idx(i, l)])
         << " psi=" << to_string(quad_psi_[idx(i, l)]) << "\n";
}

long long lemma1_count(int P)
{
  auto C = [](int N, int n) -> long long {
    if (n < 0 || N < 0 || n > N) return 0;
    long long v = 1;
    for (int t = 0; t < n; ++t) v = v * (N - t) / (t + 1);
    return v;
  };
  return C(2 * P + 2, P + 1) - 2 * C(2 * P, P - 1) + C(2 * P - 2, P - 3);
}

std::vector<std::vector<SidedPoint>> enumerate_anchor_sets(int P)
{
  if (P > 3) throw FamilyError("anchor-set enumeration supported for P <= 3 only");
  const int n = P + 1;
  // Each anchor i (sorted ascending) halves onto another anchor through one
  // of the two branches: x_i = (b_i + x_{r_i}) / 2, and no two anchors may
  // share a (b, r) pair. Since x -> (b + x_r)/2 is monotone in (b, r), a
  // candidate is a subset of n distinct pairs taken in lexicographic order.
  std::vector<std::pair<int, int>> pairs;
  for (int b = 0; b < 2; ++b)
    for (int r = 0; r < n; ++r) pairs.push_back({b, r});
  std::set<std::vector<SidedPoint>> out;
  const int np = static_cast<int>(pairs.size());
  std::vector<int> pick(n);
  auto visit = [&](const std::vector<int>& sel) {
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n, Rational(0)));
    std::vector<Rational> rhs(n);
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i) {
      auto [bi, ri] = pairs[sel[i]];
      r[i] = ri;
      A[i][i] += Rational(2);
      A[i][ri] -= Rational(1);
      rhs[i] = Rational(bi);
    }
    std::vector<Rational> x;
    if (!solve_exact(A, rhs, x)) return;
    for (int i = 0; i < n; ++i) {
      if (x[i] < Rational(0) || x[i] > Rational(1)) return;
      if (i && x[i] < x[i - 1]) return; // inconsistent with the sorted layout
    }
    // Dyadic anchors descend from the fixed points 0 (right limits) and 1
    // (left limits); odd-denominator cycles give interior points. Anchors
    // coinciding at an interior dyadic location pick up opposite limit tags
    // (one descends from 0, the other from 1).
    std::vector<Side> side(n, Side::interior);
    for (int i = 0; i < n; ++i) {
      if (!is_dyadic(x[i])) continue;
      int cur = i;
      for (int hop = 0; hop <= n; ++hop) cur = r[cur];
      if (x[cur] != Rational(0) && x[cur] != Rational(1)) return; // all-0/1 loop dup
      side[i] = x[cur] == Rational(0) ? Side::right : Side::left;
    }
    // The only excluded overlaps are anchors forced to coincide at 0 or 1;
    // interior coincidences (two anchors both solving to 1/3 at P = 3) stay
    // in the census as degenerate candidates.
    std::vector<SidedPoint> anchors(n);
    for (int i = 0; i < n; ++i) anchors[i] = {x[i], side[i]};
    std::sort(anchors.begin(), anchors.end());
    for (int i = 0; i + 1 < n; ++i)
      if (anchors[i] == anchors[i + 1] &&
          (anchors[i].loc == Rational(0) || anchors[i].loc == Rational(1)))
        return;
    out.insert(std::move(anchors));
  };
  std::vector<int> sel;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(sel.size()) == n) {
      visit(sel);
      return;
    }
    for (int k = start; k < np; ++k) {
      sel.push_back(k);
      self(self, k + 1);
      sel.pop_back();
    }
  };
  rec(rec, 0);
  return {out.begin(), out.end()};
}

FamilyPtr make_family(const std::string& id)
{
  auto pt = [](long long num, long long den, Side s) {
    return SidedPoint{Rational(num, den), s};
  };
  const Side L = Side::left, R = Side::right, I = Side::interior;
  static const std::map<std::string, std::tuple<int, int, std::vector<SidedPoint>>> cat = {
      {"k0-t1", {0, 0, {pt(0, 1, R)}}},
      {"k0-t2", {0, 0, {pt(1, 1, L)}}},
      {"p0m1-t1", {0, 1, {pt(0, 1, R)}}},
      {"p0m1-t2", {0, 1, {pt(1, 1, L)}}},
      {"p1m0-t1", {1, 0, {pt(0, 1, R), pt(1, 1, L)}}},
      {"p1m0-t2", {1, 0, {pt(1, 3, I), pt(2, 3, I)}}},
      {"p1m0-t3", {1, 0, {pt(0, 1, R), pt(1, 2, R)}}},
      {"p1m0-t4", {1, 0, {pt(1, 2, L), pt(1, 1, L)}}},
      {"p2m0", {2, 0, {pt(0, 1, R), pt(1, 2, L), pt(1, 1, L)}}},
      {"p3m0", {3, 0, {pt(0, 1, R), pt(1, 3, I), pt(2, 3, I), pt(1, 1, L)}}},
      {"p1m1", {1, 1, {pt(0, 1, R), pt(1, 1, L)}}},
  };
  auto it = cat.find(id);
  if (it == cat.end()) throw FamilyError("unknown family id: " + id);
  const auto& [P, M, anchors] = it->second;
  return std::make_shared<const NestedFamily>(id, P, M, anchors);
}

std::vector<std::string> catalogue_ids()
{
  return {"k0-t1", "k0-t2", "p0m1-t1", "p0m1-t2", "p1m0-t1", "p1m0-t2",
          "p1m0-t3", "p1m0-t4", "p2m0", "p3m0", "p1m1"};
}

} // namespace spcol
