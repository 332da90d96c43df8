#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spcol/family.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace spcol;

namespace {

RatPoly P(std::vector<Rational> c) { return RatPoly(std::move(c)); }
Rational R(long long n, long long d = 1) { return Rational(n, d); }

bool same(const RatPoly& a, const RatPoly& b) { return a.coeffs() == b.coeffs(); }

// c * (x - r0) * (x - r1) * ...
RatPoly from_roots(Rational c, std::vector<Rational> roots)
{
  RatPoly p = RatPoly::constant(c);
  for (const auto& r : roots) p = p * P({-r, R(1)});
  return p;
}

} // namespace

TEST_CASE("catalogue builds and has the expected shape")
{
  for (const auto& id : catalogue_ids()) {
    auto f = make_family(id);
    CHECK(f->id() == id);
    CHECK(f->K() == (f->P() + 1) * (f->M() + 1) - 1);
    CHECK(static_cast<int>(f->anchors0().size()) == f->P() + 1);
    CHECK(static_cast<int>(f->anchors1().size()) == f->P() + 1);
    CHECK(f->istar() == 0);
  }
  CHECK_THROWS_AS(make_family("nope"), FamilyError);
}

TEST_CASE("piecewise linear family on cell endpoints")
{
  auto f = make_family("p1m0-t1");
  CHECK(f->anchors0()[0] == SidedPoint{R(0), Side::right});
  CHECK(f->anchors0()[1] == SidedPoint{R(1), Side::left});
  CHECK(f->anchors1()[0] == SidedPoint{R(1, 2), Side::left});
  CHECK(f->anchors1()[1] == SidedPoint{R(1, 2), Side::right});
  CHECK(same(f->phi(0, 0), P({R(1), R(-1)})));
  CHECK(same(f->phi(1, 0), P({R(0), R(1)})));
  CHECK(f->psi(0, 0).half == 0);
  CHECK(same(f->psi(0, 0).poly, P({R(0), R(2)})));
  CHECK(f->psi(1, 0).half == 1);
  CHECK(same(f->psi(1, 0).poly, P({R(2), R(-2)})));
  CHECK(f->quad_phi(0, 0) == R(1, 2));
  CHECK(f->quad_psi(0, 0) == R(1, 4));
  // transform table rows are the coarse basis derivatives at the increment
  // points
  CHECK(f->transform_table(0, 0, 0, 0) == R(1, 2));
  CHECK(f->transform_table(0, 0, 1, 0) == R(1, 2));
}

TEST_CASE("interior-node and one-sided linear variants")
{
  auto t2 = make_family("p1m0-t2");
  CHECK(t2->anchors0()[0] == SidedPoint{R(1, 3), Side::interior});
  CHECK(t2->anchors1()[0] == SidedPoint{R(1, 6), Side::interior});
  CHECK(t2->anchors1()[1] == SidedPoint{R(5, 6), Side::interior});
  CHECK(same(t2->phi(0, 0), P({R(2), R(-3)})));
  CHECK(same(t2->phi(1, 0), P({R(-1), R(3)})));
  CHECK(same(t2->psi(0, 0).poly, P({R(2), R(-6)})));
  CHECK(same(t2->psi(1, 0).poly, P({R(-4), R(6)})));

  auto t3 = make_family("p1m0-t3");
  CHECK(same(t3->phi(0, 0), P({R(1), R(-2)})));
  CHECK(same(t3->phi(1, 0), P({R(0), R(2)})));
  CHECK(t3->anchors1()[0] == SidedPoint{R(1, 4), Side::right});
  CHECK(same(t3->psi(0, 0).poly, P({R(0), R(4)})));
  CHECK(same(t3->psi(1, 0).poly, P({R(-2), R(4)})));

  auto t4 = make_family("p1m0-t4");
  CHECK(same(t4->phi(0, 0), P({R(2), R(-2)})));
  CHECK(same(t4->phi(1, 0), P({R(-1), R(2)})));
  CHECK(t4->anchors1()[1] == SidedPoint{R(3, 4), Side::left});
  CHECK(same(t4->psi(0, 0).poly, P({R(2), R(-4)})));
  CHECK(same(t4->psi(1, 0).poly, P({R(4), R(-4)})));
}

TEST_CASE("quadratic family")
{
  auto f = make_family("p2m0");
  CHECK(f->anchors0()[1] == SidedPoint{R(1, 2), Side::left});
  CHECK(f->anchors1()[0] == SidedPoint{R(1, 4), Side::left});
  CHECK(f->anchors1()[1] == SidedPoint{R(1, 2), Side::right});
  CHECK(f->anchors1()[2] == SidedPoint{R(3, 4), Side::left});
  CHECK(same(f->phi(0, 0), from_roots(R(2), {R(1, 2), R(1)})));
  CHECK(same(f->phi(1, 0), from_roots(R(-4), {R(0), R(1)})));
  CHECK(same(f->phi(2, 0), from_roots(R(2), {R(0), R(1, 2)})));
  CHECK(f->psi(0, 0).half == 0);
  CHECK(same(f->psi(0, 0).poly, from_roots(R(-16), {R(0), R(1, 2)})));
  CHECK(f->psi(1, 0).half == 1);
  CHECK(same(f->psi(1, 0).poly, from_roots(R(8), {R(3, 4), R(1)})));
  CHECK(same(f->psi(2, 0).poly, from_roots(R(-16), {R(1, 2), R(1)})));
}

TEST_CASE("cubic family")
{
  auto f = make_family("p3m0");
  CHECK(same(f->phi(0, 0), from_roots(R(-9, 2), {R(1, 3), R(2, 3), R(1)})));
  CHECK(same(f->phi(1, 0), from_roots(R(27, 2), {R(0), R(2, 3), R(1)})));
  CHECK(same(f->phi(2, 0), from_roots(R(-27, 2), {R(0), R(1, 3), R(1)})));
  CHECK(same(f->phi(3, 0), from_roots(R(9, 2), {R(0), R(1, 3), R(2, 3)})));
  CHECK(same(f->psi(0, 0).poly, from_roots(R(108), {R(0), R(1, 3), R(1, 2)})));
  CHECK(same(f->psi(1, 0).poly, from_roots(R(36), {R(0), R(1, 6), R(1, 3)})));
  CHECK(same(f->psi(2, 0).poly, from_roots(R(-36), {R(2, 3), R(5, 6), R(1)})));
  CHECK(same(f->psi(3, 0).poly, from_roots(R(-108), {R(1, 2), R(2, 3), R(1)})));
  CHECK(f->psi(0, 0).half == 0);
  CHECK(f->psi(1, 0).half == 0);
  CHECK(f->psi(2, 0).half == 1);
  CHECK(f->psi(3, 0).half == 1);
}

TEST_CASE("Hermite families")
{
  auto h = make_family("p1m1");
  CHECK(same(h->phi(0, 0), from_roots(R(2), {R(-1, 2), R(1), R(1)})));
  CHECK(same(h->phi(1, 0), from_roots(R(-2), {R(0), R(0), R(3, 2)})));
  CHECK(same(h->phi(0, 1), from_roots(R(1), {R(0), R(1), R(1)})));
  CHECK(same(h->phi(1, 1), from_roots(R(1), {R(0), R(0), R(1)})));
  CHECK(same(h->psi(0, 0).poly, from_roots(R(-16), {R(0), R(0), R(3, 4)})));
  CHECK(same(h->psi(1, 0).poly, from_roots(R(16), {R(1), R(1), R(1, 4)})));
  CHECK(same(h->psi(0, 1).poly, from_roots(R(4), {R(0), R(0), R(1, 2)})));
  CHECK(same(h->psi(1, 1).poly, from_roots(R(4), {R(1), R(1), R(1, 2)})));

  auto s = make_family("p0m1-t1");
  CHECK(same(s->phi(0, 0), P({R(1)})));
  CHECK(same(s->phi(0, 1), P({R(0), R(1)})));
  CHECK(s->psi(0, 0).half == 1);
  CHECK(same(s->psi(0, 0).poly, P({R(1)})));
  CHECK(same(s->psi(0, 1).poly, P({R(-1, 2), R(1)})));

  auto m = make_family("p0m1-t2");
  CHECK(same(m->phi(0, 1), P({R(-1), R(1)})));
  CHECK(m->psi(0, 0).half == 0);
}

TEST_CASE("constant families")
{
  auto f = make_family("k0-t1");
  CHECK(same(f->phi(0, 0), P({R(1)})));
  CHECK(f->psi(0, 0).half == 1);
  CHECK(same(f->psi(0, 0).poly, P({R(1)})));
  auto g = make_family("k0-t2");
  CHECK(g->psi(0, 0).half == 0);
}

TEST_CASE("full grids are nested across levels")
{
  for (const auto& id : catalogue_ids()) {
    auto f = make_family(id);
    for (int n = 0; n < 6; ++n) {
      std::set<SidedPoint> fine;
      for (long long j = 0; j < (1LL << (n + 1)); ++j)
        for (int i = 0; i <= f->P(); ++i) fine.insert(scale_shift(f->anchors0()[i], j, n + 1));
      for (long long j = 0; j < (1LL << n); ++j)
        for (int i = 0; i <= f->P(); ++i)
          CHECK(fine.count(scale_shift(f->anchors0()[i], j, n)) == 1);
      // and the increment points of level n+1 fill exactly the rest
      std::size_t coarse = (1ULL << n) * (f->P() + 1);
      std::size_t inc = 0;
      for (long long j = 0; j < (1LL << n); ++j)
        for (int i = 0; i <= f->P(); ++i) {
          SidedPoint p = f->point_location(n + 1, j, i);
          CHECK(fine.count(p) == 1);
          ++inc;
        }
      CHECK(coarse + inc == fine.size());
    }
  }
}

TEST_CASE("assembly maps partition the refined grid")
{
  for (const auto& id : catalogue_ids()) {
    auto f = make_family(id);
    for (int h = 0; h < 2; ++h)
      for (int i = 0; i <= f->P(); ++i) {
        int ip = f->from_parent(h, i), ii = f->from_increment(h, i);
        CHECK(((ip >= 0) != (ii >= 0)));
        SidedPoint y = scale_shift(f->anchors0()[i], h, 1);
        if (ip >= 0) CHECK(y == f->anchors0()[ip]);
        if (ii >= 0) CHECK(y == f->anchors1()[ii]);
      }
  }
}

TEST_CASE("anchor-set census matches the closed-form count")
{
  CHECK(lemma1_count(0) == 2);
  CHECK(lemma1_count(1) == 4);
  CHECK(lemma1_count(2) == 12);
  CHECK(lemma1_count(3) == 41);
  for (int P = 0; P <= 3; ++P) {
    auto sets = enumerate_anchor_sets(P);
    CHECK(static_cast<long long>(sets.size()) == lemma1_count(P));
    int degenerate = 0;
    for (const auto& s : sets) {
      bool distinct_loc = true;
      for (std::size_t k = 0; k + 1 < s.size(); ++k)
        if (s[k].loc == s[k + 1].loc) distinct_loc = false;
      // candidates with a repeated location (two limits at 1/2, or the
      // doubled 1/3, 2/3 coincidence at P = 3) stay in the census but do
      // not interpolate with a single level-0 polynomial
      if (distinct_loc)
        CHECK_NOTHROW(NestedFamily("enum", P, 0, s));
      else
        ++degenerate;
    }
    CHECK(degenerate == (P == 3 ? 2 : 0));
  }
  std::vector<SidedPoint> doubled{{R(1, 3), Side::interior},
                                  {R(1, 3), Side::interior},
                                  {R(2, 3), Side::interior},
                                  {R(2, 3), Side::interior}};
  auto p3 = enumerate_anchor_sets(3);
  CHECK(std::count(p3.begin(), p3.end(), doubled) == 1);
  std::vector<SidedPoint> twosided{{R(0), Side::right},
                                   {R(1, 2), Side::left},
                                   {R(1, 2), Side::right},
                                   {R(1), Side::left}};
  CHECK(std::count(p3.begin(), p3.end(), twosided) == 1);
  CHECK_THROWS_AS(enumerate_anchor_sets(4), FamilyError);
  // the catalogue anchor sets all appear in the census
  for (const auto& id : catalogue_ids()) {
    auto f = make_family(id);
    if (f->M() != 0) continue;
    auto sets = enumerate_anchor_sets(f->P());
    CHECK(std::count(sets.begin(), sets.end(), f->anchors0()) == 1);
  }
}

TEST_CASE("point locations")
{
  auto f = make_family("p2m0");
  CHECK(f->point_location(-1, 0, 0) == f->anchors0()[0]);
  CHECK(f->point_location(0, 0, 2) == SidedPoint{R(1), Side::left});
  CHECK(f->point_location(1, 0, 1) == SidedPoint{R(1, 2), Side::right});
  CHECK(f->point_location(2, 1, 1) == SidedPoint{R(3, 4), Side::right});
  CHECK(f->point_location(3, 5, 0) == SidedPoint{R(21, 16), Side::left});
}

TEST_CASE("sided evaluation resolves interface limits")
{
  auto f = make_family("p1m0-t1");
  using K = NestedFamily::Kind;
  // left and right limits at the level-1 interface x = 1/2
  SidedPoint xm{R(1, 2), Side::left}, xp{R(1, 2), Side::right};
  CHECK(f->eval_basis(K::wavelet, 0, 0, 0, 1, 0, xm) == doctest::Approx(1.0));
  CHECK(f->eval_basis(K::wavelet, 0, 0, 0, 1, 0, xp) == doctest::Approx(0.0));
  CHECK(f->eval_basis(K::wavelet, 1, 0, 0, 1, 0, xp) == doctest::Approx(1.0));
  // plain doubles use the right-limit convention, left limit only at x = 1
  CHECK(f->eval_basis(K::wavelet, 0, 0, 0, 1, 0, 0.5) == doctest::Approx(0.0));
  CHECK(f->eval_basis(K::wavelet, 1, 0, 0, 1, 0, 0.5) == doctest::Approx(1.0));
  CHECK(f->eval_basis(K::wavelet, 1, 0, 0, 1, 0, 1.0) == doctest::Approx(0.0));
  CHECK(f->eval_basis(K::scaling, 1, 0, 0, 0, 0, 1.0) == doctest::Approx(1.0));
  // level scaling: psi^j_{i,l,n}(x) = 2^{-l(n-1)} psi(2^{n-1} x - j)
  auto h = make_family("p1m1");
  double x = 0.3;
  int n = 3, j = 1; // t = 4x - 1 = 0.2
  double base = h->psi(0, 1).poly.eval(0.2);
  CHECK(h->eval_basis(K::wavelet, 0, 1, 0, n, j, x) == doctest::Approx(0.25 * base));
  double dbase = h->psi(0, 1).poly.derivative().eval(0.2);
  CHECK(h->eval_basis(K::wavelet, 0, 1, 1, n, j, x) == doctest::Approx(dbase));
}

TEST_CASE("norms match sampled values")
{
  const int S = 200000;
  for (const auto& id : {"p2m0", "p1m1", "p1m0-t2"}) {
    auto f = make_family(id);
    for (int i = 0; i <= f->P(); ++i)
      for (int l = 0; l <= f->M(); ++l)
        for (int n : {0, 1, 3}) {
          long long j = n >= 1 ? (1LL << (n - 1)) - 1 : 0;
          double l1 = 0, l2 = 0, linf = 0;
          for (int s = 0; s < S; ++s) {
            double x = (s + 0.5) / S;
            double v = std::abs(f->eval_basis(NestedFamily::Kind::wavelet, i, l, 0, n, j, x));
            l1 += v / S;
            l2 += v * v / S;
            linf = std::max(linf, v);
          }
          BasisNorms want = f->psi_norm(i, l, n);
          CHECK(l1 == doctest::Approx(want.l1).epsilon(1e-3));
          CHECK(std::sqrt(l2) == doctest::Approx(want.l2).epsilon(1e-3));
          CHECK(linf == doctest::Approx(want.linf).epsilon(1e-2));
        }
  }
  BasisNorms root = make_family("p2m0")->psi_norm(0, 0, -1);
  CHECK(root.l1 == 1.0);
  CHECK(root.l2 == 1.0);
  CHECK(root.linf == 1.0);
}

TEST_CASE("quadrature weights integrate the basis")
{
  for (const auto& id : catalogue_ids()) {
    auto f = make_family(id);
    for (int i = 0; i <= f->P(); ++i)
      for (int l = 0; l <= f->M(); ++l) {
        CHECK(to_double(f->quad_phi(i, l)) ==
              doctest::Approx(f->phi(i, l).integrate(R(0), R(1)).numerator() /
                              double(f->phi(i, l).integrate(R(0), R(1)).denominator())));
        const auto& w = f->psi(i, l);
        Rational lo = R(w.half, 2), hi = R(w.half + 1, 2);
        CHECK(f->quad_psi(i, l) == w.poly.integrate(lo, hi));
      }
  }
}

TEST_CASE("transform table is the coarse basis at increment points")
{
  for (const auto& id : catalogue_ids()) {
    auto f = make_family(id);
    for (int i = 0; i <= f->P(); ++i)
      for (int l = 0; l <= f->M(); ++l)
        for (int ip = 0; ip <= f->P(); ++ip)
          for (int lp = 0; lp <= f->M(); ++lp) {
            Rational want = f->phi(ip, lp).derivative(l).eval(f->anchors1()[i].loc);
            CHECK(f->transform_table(i, l, ip, lp) == want);
            CHECK(f->transform_table_d(i, l, ip, lp) == doctest::Approx(to_double(want)));
          }
  }
}

TEST_CASE("invalid anchor sets are rejected")
{
  CHECK_THROWS_AS(NestedFamily("bad", 0, 0, {SidedPoint{R(1, 5), Side::interior}}),
                  FamilyError);
  CHECK_THROWS_AS(NestedFamily("bad", 1, 0,
                               {SidedPoint{R(0), Side::right}, SidedPoint{R(0), Side::right}}),
                  FamilyError);
  CHECK_THROWS_AS(NestedFamily("bad", 0, 0, {SidedPoint{R(0), Side::left}}), FamilyError);
  CHECK_THROWS_AS(NestedFamily("bad", 1, 0,
                               {SidedPoint{R(1, 3), Side::right}, SidedPoint{R(2, 3), Side::interior}}),
                  FamilyError);
}

TEST_CASE("dump uses num/den rationals")
{
  std::ostringstream ss;
  make_family("p2m0")->dump(ss);
  CHECK(ss.str().find("anchors0: 0+ 1/2- 1-") != std::string::npos);
  CHECK(ss.str().find("anchors1: 1/4- 1/2+ 3/4-") != std::string::npos);
}
