#include "spcol/uq.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

namespace spcol {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

double rate_c(int m) { return std::ldexp(1.0, -(m + 3)); } // c_i = 2^-(i+2), i = m+1

int total_order(const std::vector<int>& dv)
{
  int s = 0;
  for (int v : dv) s += v;
  return s;
}

// Side hints per coordinate: -1 left limit, +1 right limit, 0 interior.
std::vector<int> hints_of(const std::vector<SidedPoint>& x)
{
  std::vector<int> sg(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) sg[m] = static_cast<int>(x[m].side);
  return sg;
}

double f0_core(const std::vector<double>& x, const std::vector<int>& dv)
{
  double u = two_pi * (x[0] + x[1]);
  double f = std::exp(std::sin(u));
  switch (total_order(dv)) {
    case 0: return f;
    case 1: return two_pi * std::cos(u) * f;
    case 2: return two_pi * two_pi * (std::cos(u) * std::cos(u) - std::sin(u)) * f;
    default: throw std::invalid_argument("f0: derivative order too high");
  }
}

double f1_core(const std::vector<double>& x, const std::vector<int>& dv)
{
  double r = 0.3 - x[0] * x[0] - x[1] * x[1];
  double q = std::abs(r) + 0.1;
  double s = r >= 0 ? 1.0 : -1.0;
  if (dv[0] == 0 && dv[1] == 0) return 1.0 / q;
  if (dv[0] == 1 && dv[1] == 1) return 8 * x[0] * x[1] / (q * q * q);
  int m = dv[0] == 1 ? 0 : 1;
  return 2 * s * x[m] / (q * q);
}

double f2_core(const std::vector<double>& x, const std::vector<int>& dv)
{
  double f = 1;
  for (std::size_t m = 0; m < x.size(); ++m) {
    double c = rate_c(static_cast<int>(m));
    double u = x[m] - 0.51;
    double g = std::exp(-c * c * u * u);
    f *= dv[m] == 0 ? g : -2 * c * c * u * g;
  }
  return f;
}

double f3_core(const std::vector<double>& x, const std::vector<int>& sg,
               const std::vector<int>& dv)
{
  double f = 1;
  for (std::size_t m = 0; m < x.size(); ++m) {
    double c = rate_c(static_cast<int>(m));
    double u = x[m] - 0.51;
    double s = u != 0 ? (u > 0 ? 1.0 : -1.0) : (sg[m] < 0 ? -1.0 : 1.0);
    double g = std::exp(-c * std::abs(u));
    f *= dv[m] == 0 ? g : -c * s * g;
  }
  return f;
}

double f4_core(const std::vector<double>& x, const std::vector<int>& sg,
               const std::vector<int>& dv)
{
  for (int m = 0; m < 2; ++m) {
    bool outside = x[m] > 0.5 || (x[m] == 0.5 && sg[m] > 0);
    if (outside) return 0;
  }
  double f = 1;
  for (std::size_t m = 0; m < x.size(); ++m) {
    double c = rate_c(static_cast<int>(m));
    f *= std::exp(c * x[m]);
    for (int l = 0; l < dv[m]; ++l) f *= c;
  }
  return f;
}

} // namespace

TestFunction test_function(const std::string& name, int d)
{
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(name + ": " + what);
  };
  TestFunction tf;
  tf.name = name;
  tf.d = d;
  using Core = double (*)(const std::vector<double>&, const std::vector<int>&,
                          const std::vector<int>&);
  Core core = nullptr;
  if (name == "f0") {
    need(d == 2, "needs dim 2");
    core = [](const std::vector<double>& x, const std::vector<int>&,
              const std::vector<int>& dv) { return f0_core(x, dv); };
  } else if (name == "f1") {
    need(d == 2, "needs dim 2");
    core = [](const std::vector<double>& x, const std::vector<int>&,
              const std::vector<int>& dv) { return f1_core(x, dv); };
  } else if (name == "f2") {
    need(d >= 1, "needs dim >= 1");
    core = [](const std::vector<double>& x, const std::vector<int>&,
              const std::vector<int>& dv) { return f2_core(x, dv); };
  } else if (name == "f3") {
    need(d >= 1, "needs dim >= 1");
    core = [](const std::vector<double>& x, const std::vector<int>& sg,
              const std::vector<int>& dv) { return f3_core(x, sg, dv); };
  } else if (name == "f4") {
    need(d >= 2, "needs dim >= 2");
    core = [](const std::vector<double>& x, const std::vector<int>& sg,
              const std::vector<int>& dv) { return f4_core(x, sg, dv); };
  } else {
    throw std::invalid_argument("unknown test function " + name);
  }
  tf.sided = [core, d](const std::vector<SidedPoint>& pt, const std::vector<int>& dv) {
    std::vector<double> x(d);
    for (int m = 0; m < d; ++m) x[m] = pt[m].value();
    std::vector<int> lv = dv.empty() ? std::vector<int>(d, 0) : dv;
    return core(x, hints_of(pt), lv);
  };
  tf.plain = [core, d](const std::vector<double>& x, const std::vector<int>& dv) {
    std::vector<int> lv = dv.empty() ? std::vector<int>(d, 0) : dv;
    return core(x, std::vector<int>(d, 1), lv); // right-limit convention
  };
  return tf;
}

// ---------------------------------------------------------------- elliptic

std::vector<double> cheb_nodes(int n)
{
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j)
    x[j] = 0.5 * (1 - std::cos(std::numbers::pi * j / (n - 1)));
  return x;
}

namespace {

double diffusion(const std::vector<double>& y, double sigma, double x)
{
  double a = 1;
  for (std::size_t k = 1; k <= y.size(); ++k)
    a += sigma * std::cos(two_pi * k * x) * y[k - 1] /
         (k * k * std::numbers::pi * std::numbers::pi);
  return a;
}

// First-derivative Chebyshev collocation matrix on cheb_nodes(n) in [0,1].
Eigen::MatrixXd cheb_diff(int n)
{
  int N = n - 1;
  std::vector<double> t(n), c(n);
  for (int j = 0; j <= N; ++j) {
    t[j] = std::cos(std::numbers::pi * j / N);
    c[j] = (j == 0 || j == N) ? 2.0 : 1.0;
    if (j % 2 == 1) c[j] = -c[j];
  }
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i <= N; ++i) {
    double row = 0;
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      D(i, j) = (c[i] / c[j]) / (t[i] - t[j]);
      row += D(i, j);
    }
    D(i, i) = -row;
  }
  return -2 * D; // x = (1 - t)/2
}

} // namespace

std::vector<double> elliptic_solve_at(const std::vector<double>& y,
                                      const EllipticConfig& cfg)
{
  if (static_cast<int>(y.size()) != cfg.d)
    throw std::invalid_argument("elliptic_solve_at: sample size mismatch");
  int n = cfg.n_cheb;
  auto xs = cheb_nodes(n);
  Eigen::MatrixXd D = cheb_diff(n);
  Eigen::VectorXd a(n);
  for (int j = 0; j < n; ++j) a[j] = diffusion(y, cfg.sigma, xs[j]);
  Eigen::MatrixXd A = D * a.asDiagonal() * D;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  A.row(0).setZero();
  A(0, 0) = 1;
  A.row(n - 1).setZero();
  A(n - 1, n - 1) = 1;
  rhs[n - 1] = 1;
  Eigen::VectorXd u = A.partialPivLu().solve(rhs);
  return {u.data(), u.data() + n};
}

std::vector<double> elliptic_flux_at(const std::vector<double>& y,
                                     const EllipticConfig& cfg)
{
  auto u = elliptic_solve_at(y, cfg);
  int n = cfg.n_cheb;
  auto xs = cheb_nodes(n);
  Eigen::MatrixXd D = cheb_diff(n);
  Eigen::VectorXd du = D * Eigen::Map<const Eigen::VectorXd>(u.data(), n);
  std::vector<double> flux(n);
  for (int j = 0; j < n; ++j) flux[j] = diffusion(y, cfg.sigma, xs[j]) * du[j];
  return flux;
}

EllipticMoments elliptic_moments(const EllipticConfig& cfg, FamilyPtr family, int N,
                                 Mode mode)
{
  if (family->M() != 0)
    throw std::invalid_argument("elliptic_moments: interpolating families only");
  SparseIndexSet space{cfg.d, N, mode};
  std::map<std::vector<double>, std::vector<double>> cache;
  auto solve = [&](const std::vector<SidedPoint>& pt) -> const std::vector<double>& {
    std::vector<double> key(cfg.d);
    for (int m = 0; m < cfg.d; ++m) key[m] = pt[m].value();
    auto it = cache.find(key);
    if (it == cache.end()) {
      std::vector<double> y(cfg.d);
      for (int m = 0; m < cfg.d; ++m) y[m] = 2 * key[m] - 1;
      it = cache.emplace(key, elliptic_solve_at(y, cfg)).first;
    }
    return it->second;
  };

  EllipticMoments out;
  out.x = cheb_nodes(cfg.n_cheb);
  out.mean.resize(cfg.n_cheb);
  out.variance.resize(cfg.n_cheb);
  for (int j = 0; j < cfg.n_cheb; ++j) {
    SamplerND u = [&, j](const std::vector<SidedPoint>& pt, const std::vector<int>&) {
      return solve(pt)[j];
    };
    SamplerND u2 = [&, j](const std::vector<SidedPoint>& pt, const std::vector<int>&) {
      double v = solve(pt)[j];
      return v * v;
    };
    double mean = integrate_nd(fast_values_to_surplus(collocate(u, space, family)));
    double second = integrate_nd(fast_values_to_surplus(collocate(u2, space, family)));
    out.mean[j] = mean;
    out.variance[j] = second - mean * mean;
  }
  return out;
}

// ------------------------------------------------------- Kraichnan-Orszag

std::vector<double> ko_rhs(const std::vector<double>& s)
{
  std::vector<double> f(s.size());
  double y1 = s[0], y2 = s[1], y3 = s[2];
  f[0] = y1 * y3;
  f[1] = -y2 * y3;
  f[2] = -y1 * y1 + y2 * y2;
  if (s.size() == 3) return f;
  if (s.size() != 6 && s.size() != 12)
    throw std::invalid_argument("ko_rhs: state size must be 3, 6 or 12");
  // first-derivative blocks
  int nblk = s.size() == 6 ? 1 : 2;
  for (int b = 0; b < nblk; ++b) {
    const double* a = s.data() + 3 * (b + 1);
    double* g = f.data() + 3 * (b + 1);
    g[0] = a[0] * y3 + y1 * a[2];
    g[1] = -(a[1] * y3 + y2 * a[2]);
    g[2] = -2 * y1 * a[0] + 2 * y2 * a[1];
  }
  if (s.size() == 12) {
    const double* a = s.data() + 3; // d/dY1
    const double* b = s.data() + 6; // d/dY2
    const double* m = s.data() + 9; // d2/dY1 dY2
    double* g = f.data() + 9;
    g[0] = m[0] * y3 + a[0] * b[2] + b[0] * a[2] + y1 * m[2];
    g[1] = -(m[1] * y3 + a[1] * b[2] + b[1] * a[2] + y2 * m[2]);
    g[2] = -2 * (a[0] * b[0] + y1 * m[0]) + 2 * (a[1] * b[1] + y2 * m[1]);
  }
  return f;
}

void ko_step(std::vector<double>& u, double dt)
{
  std::size_t n = u.size();
  auto axpy = [n](const std::vector<double>& x, double dt) {
    auto f = ko_rhs(x);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = x[i] + dt * f[i];
    return r;
  };
  auto u1 = axpy(u, dt);
  auto u2 = axpy(u1, dt);
  for (std::size_t i = 0; i < n; ++i) u2[i] = 0.75 * u[i] + 0.25 * u2[i];
  auto u3 = axpy(u2, dt);
  for (std::size_t i = 0; i < n; ++i) u[i] = u[i] / 3 + 2.0 / 3 * u3[i];
}

std::vector<double> ko_initial(int dims, const std::vector<double>& Y, bool hermite)
{
  std::vector<double> s;
  switch (dims) {
    case 1:
      s = {1.0, 0.1 * Y[0], 0.0};
      if (hermite) s.insert(s.end(), {0.0, 0.1, 0.0});
      break;
    case 2:
      s = {1.0, 0.1 * Y[0], Y[1]};
      if (hermite) s.insert(s.end(), {0.0, 0.1, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0});
      break;
    case 3:
      if (hermite)
        throw std::invalid_argument("ko_initial: no derivative system for 3 random dims");
      s = {Y[0], Y[1], Y[2]};
      break;
    default: throw std::invalid_argument("ko_initial: dims must be 1, 2 or 3");
  }
  return s;
}

namespace {

// Mixed x-derivative of mode c from an ODE state; Y = 2x - 1 contributes a
// factor 2 per derivative order.
double ko_extract(const std::vector<double>& st, int c, const std::vector<int>& lv)
{
  int t = total_order(lv);
  if (t == 0) return st[c];
  if (st.size() == 3) throw std::invalid_argument("ko_extract: no derivative states");
  if (lv.size() == 1) return 2 * st[3 + c];
  if (t == 2) return 4 * st[9 + c];
  return lv[0] == 1 ? 2 * st[3 + c] : 2 * st[6 + c];
}

// Same-order derivative of y_c^2 by the product rule over the dims where
// lv is 1 (all orders are 0 or 1).
double ko_extract_sq(const std::vector<double>& st, int c, const std::vector<int>& lv)
{
  std::vector<int> on;
  for (std::size_t m = 0; m < lv.size(); ++m)
    if (lv[m]) on.push_back(static_cast<int>(m));
  double sum = 0;
  std::vector<int> a(lv.size(), 0), b(lv.size(), 0);
  for (int mask = 0; mask < (1 << on.size()); ++mask) {
    std::fill(a.begin(), a.end(), 0);
    std::fill(b.begin(), b.end(), 0);
    for (std::size_t k = 0; k < on.size(); ++k)
      (mask >> k & 1 ? a : b)[on[k]] = 1;
    sum += ko_extract(st, c, a) * ko_extract(st, c, b);
  }
  return sum;
}

std::vector<int> entry_levels(const NestedFamily& fam, const ElementKey& key,
                              std::size_t off, std::vector<int>& iv)
{
  std::vector<int> lv;
  split_entry(fam, key, off, iv, lv);
  return lv;
}

// Rebuilds every surplus block from current point values (fast transform
// over the table's own key set).
void resample_table(AdaptiveTables& t, const SamplerND& f)
{
  ValueGridND v(t.family(), t.dim(), Mode::corrected);
  const auto& fam = *t.family();
  std::vector<int> iv, lv;
  for (const auto& [key, blk] : t.surpluses().all()) {
    auto& dst = v.block(key);
    for (std::size_t off = 0; off < dst.size(); ++off) {
      split_entry(fam, key, off, iv, lv);
      dst[off] = f(point_location_nd(fam, key, iv), lv);
    }
  }
  SurplusStore s = fast_values_to_surplus(v);
  for (auto& [key, blk] : t.surpluses().all()) blk = *s.find(key);
}

} // namespace

KOSeries ko_run(const KOConfig& cfg)
{
  if (!cfg.family) throw std::invalid_argument("ko_run: family required");
  const int d = cfg.random_dims;
  const bool hermite = cfg.family->M() > 0;
  const auto& fam = *cfg.family;

  std::map<std::vector<double>, std::vector<double>> states;
  long long steps_done = 0;

  auto state_at = [&](const std::vector<SidedPoint>& pt) -> const std::vector<double>& {
    std::vector<double> key(d);
    for (int m = 0; m < d; ++m) key[m] = pt[m].value();
    auto it = states.find(key);
    if (it == states.end()) {
      std::vector<double> Y(d);
      for (int m = 0; m < d; ++m) Y[m] = 2 * key[m] - 1;
      auto st = ko_initial(d, Y, hermite);
      for (long long s = 0; s < steps_done; ++s) ko_step(st, cfg.dt);
      it = states.emplace(std::move(key), std::move(st)).first;
    }
    return it->second;
  };
  auto sampler = [&](int c) {
    return SamplerND([&, c](const std::vector<SidedPoint>& pt, const std::vector<int>& lv) {
      return ko_extract(state_at(pt), c,
                        lv.empty() ? std::vector<int>(d, 0) : lv);
    });
  };
  auto sq_sampler = [&](int c) {
    return SamplerND([&, c](const std::vector<SidedPoint>& pt, const std::vector<int>& lv) {
      return ko_extract_sq(state_at(pt), c,
                           lv.empty() ? std::vector<int>(d, 0) : lv);
    });
  };

  std::vector<AdaptiveTables> tab;
  for (int c = 0; c < 3; ++c) tab.emplace_back(cfg.family, d, cfg.n_max);
  Criterion crit{cfg.norm, cfg.eps, 0};

  auto indicator_max = [&](const ElementKey& key) {
    double v = 0;
    for (int c = 0; c < 3; ++c)
      v = std::max(v, element_indicator(fam, key, *tab[c].surpluses().find(key), crit));
    return v;
  };
  // refine every element whose joint indicator is significant; keeps the
  // three tables on one key set
  auto refine_union = [&](bool fixpoint) {
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<ElementKey> keys;
      for (const auto& [k, b] : tab[0].surpluses().all()) keys.push_back(k);
      std::sort(keys.begin(), keys.end());
      for (const auto& key : keys) {
        if (indicator_max(key) <= crit.epsilon) continue;
        for (const auto& child : children(key, cfg.n_max)) {
          if (tab[0].contains(child)) continue;
          for (int c = 0; c < 3; ++c) ensure_element(tab[c], child, sampler(c));
          changed = true;
        }
      }
      if (!fixpoint) break;
    }
  };

  // seed the base hull, then refine to a fixpoint at t = 0
  ElementKey root{MultiIndex(d, 0), CellIndex(d, 0)};
  for (int c = 0; c < 3; ++c) ensure_element(tab[c], root, sampler(c));
  refine_union(true);

  KOSeries out;
  auto record = [&](double t) {
    out.t.push_back(t);
    for (int c = 0; c < 3; ++c) {
      double mean = integrate_nd(tab[c].surpluses());
      ValueGridND v(cfg.family, d, Mode::corrected);
      std::vector<int> iv, lv;
      for (const auto& [key, blk] : tab[c].surpluses().all()) {
        auto& dst = v.block(key);
        auto f = sq_sampler(c);
        for (std::size_t off = 0; off < dst.size(); ++off) {
          split_entry(fam, key, off, iv, lv);
          dst[off] = f(point_location_nd(fam, key, iv), lv);
        }
      }
      double second = integrate_nd(fast_values_to_surplus(v));
      out.var[c].push_back(second - mean * mean);
    }
    out.dof.push_back(tab[0].dof());
  };
  record(0.0);

  long long total = std::llround(cfg.t_end / cfg.dt);
  for (long long step = 1; step <= total; ++step) {
    for (auto& [key, st] : states) ko_step(st, cfg.dt);
    steps_done = step;
    for (int c = 0; c < 3; ++c) resample_table(tab[c], sampler(c));
    refine_union(false);
    if (step % cfg.output_stride == 0 || step == total) record(step * cfg.dt);
  }

  std::set<std::vector<double>> pts;
  std::vector<int> iv;
  for (const auto& [key, blk] : tab[0].surpluses().all()) {
    for (std::size_t off = 0; off < blk.size(); ++off) {
      auto lv = entry_levels(fam, key, off, iv);
      if (total_order(lv) != 0) continue;
      auto pt = point_location_nd(fam, key, iv);
      std::vector<double> Y(d);
      for (int m = 0; m < d; ++m) Y[m] = 2 * pt[m].value() - 1;
      pts.insert(std::move(Y));
    }
  }
  out.final_points.assign(pts.begin(), pts.end());
  return out;
}

} // namespace spcol
