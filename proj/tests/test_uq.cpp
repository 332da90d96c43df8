#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spcol/uq.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace spcol;

namespace {

double fd1(const SamplerDbl& f, std::vector<double> x, int m, double h)
{
  std::vector<int> l0(x.size(), 0);
  auto xp = x, xm = x;
  xp[m] += h;
  xm[m] -= h;
  return (f(xp, l0) - f(xm, l0)) / (2 * h);
}

double fd2(const SamplerDbl& f, std::vector<double> x, int a, int b, double h)
{
  std::vector<int> l0(x.size(), 0);
  double s = 0;
  for (int sa : {-1, 1})
    for (int sb : {-1, 1}) {
      auto xx = x;
      xx[a] += sa * h;
      xx[b] += sb * h;
      s += sa * sb * f(xx, l0);
    }
  return s / (4 * h * h);
}

double energy(const std::vector<double>& s)
{
  return s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
}

} // namespace

TEST_CASE("benchmark function values")
{
  auto f0 = test_function("f0", 2);
  CHECK(f0.plain({0.0, 0.0}, {0, 0}) == doctest::Approx(1.0));
  CHECK(f0.plain({0.25, 0.0}, {0, 0}) == doctest::Approx(std::exp(1.0)));

  auto f1 = test_function("f1", 2);
  CHECK(f1.plain({0.0, 0.0}, {0, 0}) == doctest::Approx(2.5));
  // on the kink circle the value is 1/0.1
  double r = std::sqrt(0.15);
  CHECK(f1.plain({r, r}, {0, 0}) == doctest::Approx(10.0));

  auto f2 = test_function("f2", 3);
  CHECK(f2.plain({0.51, 0.51, 0.51}, {0, 0, 0}) == doctest::Approx(1.0));
  CHECK(f2.plain({0.51, 0.51, 0.51}, {1, 0, 0}) == doctest::Approx(0.0));

  auto f3 = test_function("f3", 2);
  CHECK(f3.plain({0.51, 0.51}, {0, 0}) == doctest::Approx(1.0));

  auto f4 = test_function("f4", 2);
  CHECK(f4.plain({0.6, 0.1}, {0, 0}) == 0.0);
  CHECK(f4.plain({0.1, 0.6}, {0, 0}) == 0.0);
  CHECK(f4.plain({0.25, 0.25}, {0, 0}) ==
        doctest::Approx(std::exp(0.25 / 8 + 0.25 / 16)));

  CHECK_THROWS_AS((void)test_function("f0", 3), std::invalid_argument);
  CHECK_THROWS_AS((void)test_function("nope", 2), std::invalid_argument);
}

TEST_CASE("sided evaluation at kinks and jumps")
{
  auto f4 = test_function("f4", 2);
  SidedPoint half{Rational(1, 2), Side::interior};
  SidedPoint quarter{Rational(1, 4), Side::interior};
  CHECK(f4.sided({half, quarter}, {0, 0}) ==
        doctest::Approx(std::exp(0.5 / 8 + 0.25 / 16)));
  SidedPoint half_right{Rational(1, 2), Side::right};
  CHECK(f4.sided({half_right, quarter}, {0, 0}) == 0.0);
  SidedPoint half_left{Rational(1, 2), Side::left};
  CHECK(f4.sided({half_left, quarter}, {0, 0}) ==
        doctest::Approx(std::exp(0.5 / 8 + 0.25 / 16)));
}

TEST_CASE("analytic derivatives match finite differences")
{
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double h = 1e-5;
  for (const char* name : {"f0", "f1", "f2", "f3", "f4"}) {
    auto tf = test_function(name, 2);
    int checked = 0;
    while (checked < 25) {
      std::vector<double> x{u(rng), u(rng)};
      // stay away from the kinks and the cut-off line
      if (std::abs(0.3 - x[0] * x[0] - x[1] * x[1]) < 0.05) continue;
      if (std::abs(x[0] - 0.51) < 0.05 || std::abs(x[1] - 0.51) < 0.05) continue;
      if (std::abs(x[0] - 0.5) < 0.05 || std::abs(x[1] - 0.5) < 0.05) continue;
      ++checked;
      for (int m = 0; m < 2; ++m) {
        std::vector<int> e(2, 0);
        e[m] = 1;
        double ex = tf.plain(x, e);
        CHECK(std::abs(ex - fd1(tf.plain, x, m, h)) < 1e-4 * (1 + std::abs(ex)));
      }
      double mixed = tf.plain(x, {1, 1});
      CHECK(std::abs(mixed - fd2(tf.plain, x, 0, 1, h)) < 1e-3 * (1 + std::abs(mixed)));
    }
  }
}

TEST_CASE("chebyshev nodes")
{
  auto x = cheb_nodes(9);
  CHECK(x.front() == doctest::Approx(0.0));
  CHECK(x.back() == doctest::Approx(1.0));
  CHECK(std::is_sorted(x.begin(), x.end()));
  CHECK(x[4] == doctest::Approx(0.5));
}

TEST_CASE("deterministic diffusion solves exactly")
{
  EllipticConfig cfg{2, 0.0, 31};
  auto u = elliptic_solve_at({0.3, -0.7}, cfg); // sigma 0: a = 1, u = x
  auto xs = cheb_nodes(cfg.n_cheb);
  for (int j = 0; j < cfg.n_cheb; ++j) CHECK(std::abs(u[j] - xs[j]) < 1e-10);

  EllipticConfig active{2, 4.0, 31};
  auto u0 = elliptic_solve_at({0.0, 0.0}, active); // y = 0: a = 1 again
  for (int j = 0; j < active.n_cheb; ++j) CHECK(std::abs(u0[j] - xs[j]) < 1e-10);
}

TEST_CASE("flux is spatially constant")
{
  // the spread decays spectrally in the node count: about 1e-6 at 31
  // nodes for d = 2 and below 1e-8 from 41 nodes on
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto [d, n] : {std::pair{2, 41}, std::pair{3, 51}}) {
    EllipticConfig cfg{d, 4.0, n};
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> y(d);
      for (auto& v : y) v = u(rng);
      auto flux = elliptic_flux_at(y, cfg);
      auto [lo, hi] = std::minmax_element(flux.begin(), flux.end());
      CHECK(*hi - *lo < 1e-6);
      CHECK(*lo > 0); // u is increasing
    }
  }
}

TEST_CASE("elliptic moments")
{
  auto fam = make_family("p2m0");
  SUBCASE("sigma 0 gives the deterministic profile")
  {
    EllipticConfig cfg{2, 0.0, 17};
    auto mom = elliptic_moments(cfg, fam, 2);
    auto xs = cheb_nodes(cfg.n_cheb);
    for (int j = 0; j < cfg.n_cheb; ++j) {
      CHECK(std::abs(mom.mean[j] - xs[j]) < 1e-10);
      CHECK(std::abs(mom.variance[j]) < 1e-12);
    }
  }
  SUBCASE("random diffusion converges with the level budget")
  {
    EllipticConfig cfg{1, 4.0, 17};
    auto ref = elliptic_moments(cfg, fam, 7);
    double prev = 1e300;
    for (int N : {1, 3, 5}) {
      auto mom = elliptic_moments(cfg, fam, N);
      double worst = 0;
      for (int j = 0; j < cfg.n_cheb; ++j)
        worst = std::max(worst, std::abs(mom.variance[j] - ref.variance[j]));
      CHECK(worst < prev);
      prev = worst;
    }
    CHECK(prev < 1e-9);
    // variance vanishes at the fixed boundaries and not inside
    CHECK(std::abs(ref.variance.front()) < 1e-14);
    CHECK(std::abs(ref.variance.back()) < 1e-14);
    CHECK(*std::max_element(ref.variance.begin(), ref.variance.end()) > 1e-5);
  }
  SUBCASE("derivative-carrying families are rejected")
  {
    EllipticConfig cfg{1, 4.0, 9};
    CHECK_THROWS_AS((void)elliptic_moments(cfg, make_family("p1m1"), 2),
                    std::invalid_argument);
  }
}

TEST_CASE("three-mode system right-hand side")
{
  auto f = ko_rhs({1.0, 1.0, 0.0});
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == 0.0);
  f = ko_rhs({1.0, 0.0, 1.0});
  CHECK(f[0] == 1.0);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == -1.0);

  // first-derivative block: d/dt y_Y = J(y) y_Y
  auto g = ko_rhs({1.0, 0.2, 0.5, 0.0, 0.1, 0.0});
  CHECK(g[3] == doctest::Approx(0.0));
  CHECK(g[4] == doctest::Approx(-0.05));
  CHECK(g[5] == doctest::Approx(0.04));

  CHECK_THROWS_AS((void)ko_rhs({1.0, 2.0, 3.0, 4.0}), std::invalid_argument);
}

TEST_CASE("derivative states track finite differences of the flow")
{
  const double Y = 0.37, h = 1e-6, dt = 0.01;
  auto mid = ko_initial(1, {Y}, true);
  auto up = ko_initial(1, {Y + h}, false);
  auto dn = ko_initial(1, {Y - h}, false);
  for (int s = 0; s < 300; ++s) {
    ko_step(mid, dt);
    ko_step(up, dt);
    ko_step(dn, dt);
  }
  for (int c = 0; c < 3; ++c) {
    double fd = (up[c] - dn[c]) / (2 * h);
    CHECK(mid[3 + c] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("energy invariant is conserved by the integrator")
{
  for (double Y : {-0.8, 0.1, 0.9}) {
    auto s = ko_initial(1, {Y}, false);
    double e0 = energy(s);
    double t = 0;
    for (int k = 0; k < 1000; ++k) {
      ko_step(s, 0.01);
      t += 0.01;
      CHECK(std::abs(energy(s) - e0) < 1e-6 * std::max(t, 1.0));
    }
  }
}

TEST_CASE("initial variance of the random modes")
{
  SUBCASE("one random dimension")
  {
    KOConfig cfg;
    cfg.random_dims = 1;
    cfg.t_end = 0;
    cfg.family = make_family("p2m0");
    auto out = ko_run(cfg);
    REQUIRE(out.t.size() == 1);
    CHECK(std::abs(out.var[0][0]) < 1e-12);
    CHECK(out.var[1][0] == doctest::Approx(0.01 / 3));
    CHECK(std::abs(out.var[2][0]) < 1e-12);
  }
  SUBCASE("two random dimensions")
  {
    KOConfig cfg;
    cfg.random_dims = 2;
    cfg.t_end = 0;
    cfg.family = make_family("p2m0");
    auto out = ko_run(cfg);
    CHECK(out.var[1][0] == doctest::Approx(0.01 / 3));
    CHECK(out.var[2][0] == doctest::Approx(1.0 / 3));
  }
}

TEST_CASE("short evolution cross-checked against monte carlo")
{
  KOConfig cfg;
  cfg.random_dims = 1;
  cfg.t_end = 2.0;
  cfg.family = make_family("p2m0");
  auto out = ko_run(cfg);

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 20000;
  std::array<double, 3> s1{}, s2{};
  for (int k = 0; k < n; ++k) {
    auto s = ko_initial(1, {u(rng)}, false);
    for (int step = 0; step < 200; ++step) ko_step(s, cfg.dt);
    for (int c = 0; c < 3; ++c) {
      s1[c] += s[c];
      s2[c] += s[c] * s[c];
    }
  }
  for (int c = 0; c < 3; ++c) {
    double mc_var = s2[c] / n - (s1[c] / n) * (s1[c] / n);
    CHECK(out.var[c].back() == doctest::Approx(mc_var).epsilon(0.05).scale(0.01));
  }
}

TEST_CASE("interpolating and derivative families agree")
{
  KOConfig a;
  a.random_dims = 1;
  a.t_end = 3.0;
  a.family = make_family("p2m0");
  auto la = ko_run(a);

  KOConfig b = a;
  b.family = make_family("p1m1");
  auto he = ko_run(b);

  REQUIRE(la.t == he.t);
  double worst = 0;
  for (std::size_t k = 0; k < la.t.size(); ++k)
    worst = std::max(worst, std::abs(la.var[1][k] - he.var[1][k]));
  CHECK(worst < 2e-2);
  CHECK(worst > 0); // the discretizations differ
}

TEST_CASE("evolution refines the grid near developing features")
{
  KOConfig cfg;
  cfg.random_dims = 1;
  cfg.t_end = 5.0;
  cfg.family = make_family("p2m0");
  auto out = ko_run(cfg);
  CHECK(out.dof.back() > out.dof.front());
  CHECK(!out.final_points.empty());
  for (const auto& p : out.final_points) {
    REQUIRE(p.size() == 1);
    CHECK(p[0] >= -1.0);
    CHECK(p[0] <= 1.0);
  }
}
