#include "spcol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace spcol {

ErrorReport sampled_errors(const SamplerDbl& f_true, const SurplusStore& interp,
                           int samples, std::uint64_t seed)
{
  const int d = interp.dim();
  CounterRng rng(seed);
  ErrorReport r;
  r.samples = samples;
  r.seed = seed;
  std::vector<double> x(d);
  std::vector<int> zero(d, 0), em(d, 0);
  double a1 = 0, a2 = 0, ah = 0;
  for (int t = 0; t < samples; ++t) {
    for (int m = 0; m < d; ++m) x[m] = rng.uniform01();
    double e = std::abs(eval_interp_nd(interp, x) - f_true(x, zero));
    a1 += e;
    a2 += e * e;
    r.linf = std::max(r.linf, e);
    double g = 0;
    for (int m = 0; m < d; ++m) {
      em[m] = 1;
      double de = eval_interp_nd(interp, x, em) - f_true(x, em);
      g += de * de;
      em[m] = 0;
    }
    ah += g;
  }
  r.l1 = a1 / samples;
  r.l2 = std::sqrt(a2 / samples);
  r.h1 = std::sqrt(ah / samples);
  return r;
}

std::vector<ConvergenceRow> convergence_table(const SamplerND& f_sided,
                                              const SamplerDbl& f_true, FamilyPtr family,
                                              int d, const std::vector<int>& n_range,
                                              Mode mode, int samples, std::uint64_t seed)
{
  std::vector<ConvergenceRow> rows;
  for (int N : n_range) {
    SparseIndexSet space{d, N, mode};
    auto v = collocate(f_sided, space, family);
    auto s = fast_values_to_surplus(v);
    ConvergenceRow row;
    row.N = N;
    row.h = std::ldexp(1.0, -(N + 1));
    row.err = sampled_errors(f_true, s, samples, seed);
    rows.push_back(row);
  }
  return rows;
}

void emit_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& os)
{
  os << "N,h,L1,L1_order,L2,L2_order,Linf,Linf_order,H1,H1_order\n";
  auto order = [](double prev, double cur) {
    return prev > 0 && cur > 0 ? std::log2(prev / cur) : 0.0;
  };
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    const ErrorReport* p = k ? &rows[k - 1].err : nullptr;
    os << r.N << "," << r.h;
    os << "," << r.err.l1 << "," << (p ? order(p->l1, r.err.l1) : 0.0);
    os << "," << r.err.l2 << "," << (p ? order(p->l2, r.err.l2) : 0.0);
    os << "," << r.err.linf << "," << (p ? order(p->linf, r.err.linf) : 0.0);
    os << "," << r.err.h1 << "," << (p ? order(p->h1, r.err.h1) : 0.0);
    os << "\n";
  }
}

SurplusStore dense_oracle_surplus(const ValueGridND& v)
{
  if (v.dof() > 200000) throw std::invalid_argument("dense oracle limited to small grids");
  const NestedFamily& fam = *v.family();
  const int d = v.dim();
  SurplusStore s(v.family(), d, v.mode());
  std::vector<ElementKey> keys;
  for (const auto& [key, blk] : v.all()) keys.push_back(key);
  std::sort(keys.begin(), keys.end(), [](const ElementKey& a, const ElementKey& b) {
    int sa = norm1(a.n), sb = norm1(b.n);
    if (sa != sb) return sa < sb;
    return a < b;
  });

  struct Entry {
    ElementKey key;
    std::vector<int> iv, lv;
    double b;
  };
  std::vector<Entry> done;
  std::vector<int> iv(d), lv(d);
  for (const auto& key : keys) {
    const auto& vals = *v.find(key);
    auto& blk = s.block(key);
    for (std::size_t off = 0; off < vals.size(); ++off) {
      split_entry(fam, key, off, iv, lv);
      bool excluded = false;
      if (v.mode() == Mode::corrected)
        for (int m = 0; m < d; ++m)
          if (key.n[m] == 0 && iv[m] == fam.istar() && lv[m] == 0) excluded = true;
      if (excluded) continue;
      auto pt = point_location_nd(fam, key, iv);
      double b = vals[off];
      for (const auto& e : done) b -= e.b * eval_basis_nd(fam, e.key, e.iv, e.lv, pt, lv);
      blk[off] = b;
      done.push_back({key, iv, lv, b});
    }
  }
  return s;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace spcol
