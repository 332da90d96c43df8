#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spcol/analysis.hpp"
#include "spcol/transform1d.hpp"
#include "spcol/uq.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace spcol;

namespace {

// smooth 2D function with analytic first derivatives
double g2(const std::vector<double>& x, const std::vector<int>& l)
{
  double a = x[0], b = x[1];
  double fa = l[0] == 0 ? std::exp(0.7 * a) : 0.7 * std::exp(0.7 * a);
  double fb = l[1] == 0 ? std::sin(2 * b + 0.3) : 2 * std::cos(2 * b + 0.3);
  return fa * fb;
}

SamplerND sided_of(const SamplerDbl& f, int d)
{
  return [f, d](const std::vector<SidedPoint>& pt, const std::vector<int>& lv) {
    std::vector<double> x(d);
    for (int m = 0; m < d; ++m) x[m] = pt[m].value();
    return f(x, lv.empty() ? std::vector<int>(d, 0) : lv);
  };
}

} // namespace

TEST_CASE("counter rng is deterministic and uniform")
{
  CounterRng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  CounterRng c(42);
  double mean = 0;
  int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = c.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  mean /= n;
  CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("sampled errors vanish for an in-space function")
{
  // degree <= 1 per dim is exact for every catalogue family
  SamplerDbl f = [](const std::vector<double>& x, const std::vector<int>& l) {
    double fa = l[0] == 0 ? 2 * x[0] - 1 : l[0] == 1 ? 2.0 : 0.0;
    double fb = l[1] == 0 ? x[1] + 3 : l[1] == 1 ? 1.0 : 0.0;
    return fa * fb;
  };
  auto s = fast_values_to_surplus(
      collocate(sided_of(f, 2), {2, 2, Mode::standard}, make_family("p1m0-t1")));
  auto rep = sampled_errors(f, s, 5000, 42);
  CHECK(rep.l1 < 1e-13);
  CHECK(rep.l2 < 1e-13);
  CHECK(rep.linf < 1e-13);
  CHECK(rep.h1 < 1e-12);
}

TEST_CASE("sampled errors are reproducible")
{
  SamplerDbl f = g2;
  auto s = fast_values_to_surplus(
      collocate(sided_of(f, 2), {2, 3, Mode::standard}, make_family("p2m0")));
  auto a = sampled_errors(f, s, 20000, 9);
  auto b = sampled_errors(f, s, 20000, 9);
  CHECK(a.l1 == b.l1);
  CHECK(a.l2 == b.l2);
  CHECK(a.linf == b.linf);
  CHECK(a.h1 == b.h1);
  auto c = sampled_errors(f, s, 20000, 10);
  CHECK(a.linf != c.linf);
}

TEST_CASE("error norms are ordered and plausible")
{
  SamplerDbl f = g2;
  auto s = fast_values_to_surplus(
      collocate(sided_of(f, 2), {2, 4, Mode::standard}, make_family("p1m0-t1")));
  auto rep = sampled_errors(f, s, 50000, 42);
  CHECK(rep.l1 <= rep.l2);
  CHECK(rep.l2 <= rep.linf);
  CHECK(rep.linf > 0);
  CHECK(rep.h1 > rep.l2); // derivative error dominates for piecewise linears
}

TEST_CASE("dense oracle agrees with the fast transform")
{
  // random smooth samples; plain random block values would break the
  // point-value consistency the corrected hierarchy relies on
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* id : {"p1m0-t2", "p1m1"}) {
    auto fam = make_family(id);
    for (Mode mode : {Mode::standard, Mode::corrected}) {
      double a = u(rng), w = 3 * u(rng), p = u(rng), b = u(rng), c = u(rng);
      SamplerND f = [&](const std::vector<SidedPoint>& x, const std::vector<int>& l) {
        double prod = 1;
        for (std::size_t m = 0; m < x.size(); ++m) {
          double t = x[m].value();
          prod *= a * std::pow(w, l[m]) * std::sin(w * t + p + 1.5707963267948966 * l[m]) +
                  b * std::pow(c, l[m]) * std::exp(c * t);
        }
        return prod;
      };
      auto v = collocate(f, {2, 3, mode}, fam);
      auto fast = fast_values_to_surplus(v);
      auto ref = dense_oracle_surplus(v);
      for (const auto& [key, blk] : fast.all()) {
        const auto& rb = *ref.find(key);
        for (std::size_t off = 0; off < blk.size(); ++off)
          CHECK(std::abs(blk[off] - rb[off]) < 1e-12);
      }
    }
  }
}

TEST_CASE("dense oracle matches the 1d pyramid transform")
{
  auto fam = make_family("p1m1");
  SamplerDbl f = [](const std::vector<double>& x, const std::vector<int>& l) {
    return l[0] == 0 ? std::sin(3 * x[0]) : 3 * std::cos(3 * x[0]);
  };
  ValueGridND v(fam, 1, Mode::standard);
  for (const auto& key : enumerate_sparse_elements(1, 4, *fam, Mode::standard)) {
    auto& blk = v.block(key);
    std::vector<int> iv(1), lv(1);
    for (std::size_t off = 0; off < blk.size(); ++off) {
      split_entry(*fam, key, off, iv, lv);
      auto pt = point_location_nd(*fam, key, iv);
      blk[off] = f({pt[0].value()}, lv);
    }
  }
  auto ref = dense_oracle_surplus(v);
  auto fast = fast_values_to_surplus(v);
  for (const auto& [key, blk] : fast.all()) {
    const auto& rb = *ref.find(key);
    for (std::size_t off = 0; off < blk.size(); ++off)
      CHECK(std::abs(blk[off] - rb[off]) < 1e-12);
  }
}

TEST_CASE("dense oracle refuses oversized problems")
{
  ValueGridND v(make_family("p1m0-t1"), 10, Mode::standard);
  for (const auto& key : enumerate_sparse_elements(10, 8, *v.family(), Mode::standard))
    v.block(key);
  CHECK_THROWS_AS((void)dense_oracle_surplus(v), std::invalid_argument);
}

TEST_CASE("convergence rates match the polynomial order")
{
  SamplerDbl f = g2;
  auto fs = sided_of(f, 2);
  SUBCASE("second order family")
  {
    auto rows = convergence_table(fs, f, make_family("p1m0-t1"), 2,
                                  {4, 5, 6, 7}, Mode::standard, 20000, 42);
    REQUIRE(rows.size() == 4);
    for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
      double order = std::log2(rows[r].err.l2 / rows[r + 1].err.l2);
      CHECK(order > 1.4); // dimension-adapted rate 2 up to log factors
      CHECK(order < 2.6);
    }
    CHECK(rows[0].h == doctest::Approx(std::ldexp(1.0, -5)));
  }
  SUBCASE("fourth order family")
  {
    auto rows = convergence_table(fs, f, make_family("p3m0"), 2,
                                  {3, 4, 5}, Mode::standard, 20000, 42);
    for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
      double order = std::log2(rows[r].err.l2 / rows[r + 1].err.l2);
      CHECK(order > 3.2);
      CHECK(order < 4.8);
    }
  }
}

TEST_CASE("reference errors for the trigonometric benchmark")
{
  // published reference values for the 6- and 10-mesh-level spaces (our
  // level budgets 5 and 9), sampled with 1e5 points
  auto f0 = test_function("f0", 2);
  auto rows = convergence_table(f0.sided, f0.plain, make_family("p1m0-t1"), 2, {5},
                                Mode::standard, 100000, 42);
  CHECK(rows[0].err.l2 == doctest::Approx(1.89e-01).epsilon(0.10));
  CHECK(rows[0].err.linf == doctest::Approx(5.69e-01).epsilon(0.10));

  auto deep = convergence_table(f0.sided, f0.plain, make_family("p3m0"), 2, {9},
                                Mode::standard, 100000, 42);
  CHECK(deep[0].err.l1 == doctest::Approx(2.36e-08).epsilon(2.0)); // within a factor of 3
}

TEST_CASE("csv emitter")
{
  auto f0 = test_function("f0", 2);
  auto rows = convergence_table(f0.sided, f0.plain, make_family("p1m0-t1"), 2,
                                {2, 3}, Mode::standard, 2000, 42);
  std::ostringstream os;
  emit_convergence_csv(rows, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "N,h,L1,L1_order,L2,L2_order,Linf,Linf_order,H1,H1_order");
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
  }
  CHECK(n == rows.size());
}

TEST_CASE("least squares slope")
{
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  CHECK(fit_slope(x, y) == doctest::Approx(2.0));
  std::vector<double> noisy{1.1, 2.9, 5.05, 6.95};
  CHECK(fit_slope(x, noisy) == doctest::Approx(2.0).epsilon(0.05));
}
