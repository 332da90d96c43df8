#include "spcol/sparse_nd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <map>
#include <ostream>
#include <stdexcept>

namespace spcol {

ElementKey parent_key(const ElementKey& key, int m)
{
  ElementKey p = key;
  if (p.n[m] >= 2) {
    p.n[m] -= 1;
    p.j[m] >>= 1;
  } else {
    p.n[m] -= 1;
    p.j[m] = 0;
  }
  return p;
}

bool GridND::downward_closed() const
{
  for (const auto& [key, blk] : blocks_)
    for (int m = 0; m < d_; ++m)
      if (key.n[m] > min_level() && !contains(parent_key(key, m))) return false;
  return true;
}

std::vector<SidedPoint> point_location_nd(const NestedFamily& fam, const ElementKey& key,
                                          const std::vector<int>& i)
{
  std::vector<SidedPoint> x(key.n.size());
  for (std::size_t m = 0; m < key.n.size(); ++m)
    x[m] = fam.point_location(key.n[m], key.j[m], key.n[m] == -1 ? 0 : i[m]);
  return x;
}

std::vector<ElementKey> enumerate_sparse_elements(int d, int N, const NestedFamily& fam,
                                                  Mode mode)
{
  (void)fam;
  SparseIndexSet set{d, N, mode};
  std::vector<ElementKey> out;
  MultiIndex n(d, set.min_level());
  auto rec_cells = [&](auto&& self, ElementKey& key, int m) -> void {
    if (m == d) {
      out.push_back(key);
      return;
    }
    for (long long j = 0; j < level_cells(key.n[m]); ++j) {
      key.j[m] = j;
      self(self, key, m + 1);
    }
  };
  auto rec_levels = [&](auto&& self, int m, int used) -> void {
    if (m == d) {
      ElementKey key{n, CellIndex(d, 0)};
      rec_cells(rec_cells, key, 0);
      return;
    }
    for (int v = set.min_level(); v <= N && used + std::max(v, 0) <= set.budget(); ++v) {
      n[m] = v;
      self(self, m + 1, used + std::max(v, 0));
    }
  };
  rec_levels(rec_levels, 0, 0);
  return out;
}

namespace {

long long binom(long long n, long long k)
{
  if (k < 0 || n < 0 || k > n) return 0;
  long long v = 1;
  for (long long t = 0; t < k; ++t) v = v * (n - t) / (t + 1);
  return v;
}

long long ipow(long long b, int e)
{
  long long v = 1;
  while (e-- > 0) v *= b;
  return v;
}

// DoF of e dimensions all at level >= 1 with total level budget <= L.
long long levels_ge1(int e, int L, int K)
{
  if (e == 0) return 1;
  if (L < e) return 0;
  long long s = 0;
  for (int t = 0; t <= L - e; ++t) s += ipow(2, t) * binom(t + e - 1, e - 1);
  return ipow(K + 1, e) * s;
}

} // namespace

long long sparse_dim(int d, int N, int K, Mode mode)
{
  long long total = 0;
  if (mode == Mode::corrected && N - d + 1 < 0) return 0;
  if (mode == Mode::standard) {
    for (int r = 0; r <= d; ++r)
      total += binom(d, r) * ipow(K + 1, r) * levels_ge1(d - r, N, K);
  } else {
    const int B = N - d + 1;
    for (int q = 0; q <= d; ++q) {
      int e = d - q;
      long long part = 0;
      for (int r = 0; r <= e; ++r)
        part += binom(e, r) * ipow(K, r) * levels_ge1(e - r, B, K);
      total += binom(d, q) * part;
    }
  }
  return total;
}

namespace {

// Decomposes a flat block offset into per-dimension local indices.
void decompose(std::size_t off, const std::vector<int>& sizes, std::vector<int>& loc)
{
  for (int m = static_cast<int>(sizes.size()) - 1; m >= 0; --m) {
    loc[m] = static_cast<int>(off % sizes[m]);
    off /= sizes[m];
  }
}

} // namespace

void split_entry(const NestedFamily& fam, const ElementKey& key, std::size_t off,
                 std::vector<int>& iv, std::vector<int>& lv)
{
  iv.resize(key.n.size());
  lv.resize(key.n.size());
  for (int m = static_cast<int>(key.n.size()) - 1; m >= 0; --m) {
    int ls = key.n[m] == -1 ? 1 : fam.block_size();
    int loc = static_cast<int>(off % ls);
    off /= ls;
    iv[m] = key.n[m] == -1 ? 0 : loc / (fam.M() + 1);
    lv[m] = key.n[m] == -1 ? 0 : loc % (fam.M() + 1);
  }
}

namespace {

template <typename Coord>
double basis_nd_impl(const NestedFamily& fam, const ElementKey& key,
                     const std::vector<int>& iv, const std::vector<int>& lv,
                     const std::vector<Coord>& x, const std::vector<int>& deriv)
{
  double prod = 1;
  for (std::size_t m = 0; m < key.n.size() && prod != 0.0; ++m) {
    auto kind = key.n[m] >= 1 ? NestedFamily::Kind::wavelet : NestedFamily::Kind::scaling;
    prod *= fam.eval_basis(kind, iv[m], lv[m], deriv[m], key.n[m], key.j[m], x[m]);
  }
  return prod;
}

} // namespace

double eval_basis_nd(const NestedFamily& fam, const ElementKey& key,
                     const std::vector<int>& iv, const std::vector<int>& lv,
                     const std::vector<SidedPoint>& x, const std::vector<int>& deriv)
{
  return basis_nd_impl(fam, key, iv, lv, x, deriv);
}

double eval_basis_nd(const NestedFamily& fam, const ElementKey& key,
                     const std::vector<int>& iv, const std::vector<int>& lv,
                     const std::vector<double>& x, const std::vector<int>& deriv)
{
  return basis_nd_impl(fam, key, iv, lv, x, deriv);
}

ValueGridND collocate(const SamplerND& f, const SparseIndexSet& space, FamilyPtr family)
{
  ValueGridND v(family, space.d, space.mode);
  const NestedFamily& fam = *v.family();
  auto keys = enumerate_sparse_elements(space.d, space.N, fam, space.mode);
  std::vector<int> sizes(space.d), loc(space.d), iv(space.d), lv(space.d);
  std::vector<SidedPoint> x(space.d);
  for (const auto& key : keys) {
    auto& blk = v.block(key);
    for (int m = 0; m < space.d; ++m) sizes[m] = v.local_size(key.n[m]);
    for (std::size_t off = 0; off < blk.size(); ++off) {
      decompose(off, sizes, loc);
      for (int m = 0; m < space.d; ++m) {
        iv[m] = key.n[m] == -1 ? 0 : loc[m] / (fam.M() + 1);
        lv[m] = key.n[m] == -1 ? 0 : loc[m] % (fam.M() + 1);
        x[m] = fam.point_location(key.n[m], key.j[m], iv[m]);
      }
      blk[off] = f(x, lv);
    }
  }
  return v;
}

namespace {

struct LineEntry {
  int n;
  long long c;
  double* base;   // first line slot inside the element block for this combo
  std::size_t stride;
  int size;       // 1 for level -1, K+1 otherwise
};

// One combo line along a single direction: the level/cell hierarchy with
// (K+1)-vectors per entry. Runs the 1D pyramid up or down in place.
class LineTransform {
public:
  LineTransform(const NestedFamily& fam, bool corrected)
      : fam_(fam), corrected_(corrected), nb_(fam.block_size())
  {
  }

  void run(std::map<std::pair<int, long long>, LineEntry>& line, bool descending)
  {
    line_ = &line;
    full_.clear();
    if (descending) {
      // full-grid predictions read raw values, so compute and stash all of
      // them before any entry is overwritten
      std::map<std::pair<int, long long>, std::vector<double>> preds;
      for (auto& [nc, e] : line)
        if (e.n >= 1) preds.emplace(nc, predict(e.n, e.c));
      if (corrected_) correct_down();
      for (auto& [nc, e] : line)
        if (e.n >= 1) {
          const auto& p = preds[nc];
          for (int k = 0; k < nb_; ++k) e.base[k * e.stride] -= p[k];
        }
    } else {
      if (corrected_) correct_up();
      // ascending: predictions read already-reconstructed values
      for (auto& [nc, e] : line)
        if (e.n >= 1) {
          auto p = predict(e.n, e.c);
          for (int k = 0; k < nb_; ++k) e.base[k * e.stride] += p[k];
        }
    }
  }

private:
  std::vector<double> read(const LineEntry& e) const
  {
    std::vector<double> v(e.size);
    for (int k = 0; k < e.size; ++k) v[k] = e.base[k * e.stride];
    return v;
  }

  // Values on the full level-n grid at cell c, assembled from the ancestor
  // chain of increment entries.
  const std::vector<double>& full(int n, long long c)
  {
    auto it = full_.find({n, c});
    if (it != full_.end()) return it->second;
    std::vector<double> v;
    if (n == 0) {
      v = read(line_->at({0, 0}));
    } else {
      const auto& coarse = full(n - 1, c >> 1);
      auto inc = read(line_->at({n, c >> 1}));
      int h = static_cast<int>(c & 1);
      v.resize(nb_);
      for (int i = 0; i <= fam_.P(); ++i)
        for (int l = 0; l <= fam_.M(); ++l) {
          int i0 = fam_.from_parent(h, i);
          v[fam_.idx(i, l)] = i0 >= 0 ? coarse[fam_.idx(i0, l)]
                                      : inc[fam_.idx(fam_.from_increment(h, i), l)];
        }
    }
    return full_.emplace(std::make_pair(n, c), std::move(v)).first->second;
  }

  // Coarse-grid prediction at the increment points of (n, c), n >= 1.
  std::vector<double> predict(int n, long long c)
  {
    const auto& coarse = full(n - 1, c);
    std::vector<double> p(nb_, 0.0);
    for (int i = 0; i <= fam_.P(); ++i)
      for (int l = 0; l <= fam_.M(); ++l) {
        double acc = 0;
        for (int ip = 0; ip <= fam_.P(); ++ip)
          for (int lp = 0; lp <= fam_.M(); ++lp)
            acc += std::ldexp(coarse[fam_.idx(ip, lp)], (n - 1) * (l - lp)) *
                   fam_.transform_table_d(i, l, ip, lp);
        p[fam_.idx(i, l)] = acc;
      }
    return p;
  }

  void correct_down()
  {
    auto mit = line_->find({-1, 0});
    if (mit == line_->end()) return; // line carries no level -1 entry
    double c0 = mit->second.base[0];
    auto zit = line_->find({0, 0});
    if (zit == line_->end()) return;
    LineEntry& e = zit->second;
    for (int i = 0; i <= fam_.P(); ++i) {
      double& slot = e.base[fam_.idx(i, 0) * e.stride];
      slot = i == fam_.istar() ? 0.0 : slot - c0;
    }
  }

  void correct_up()
  {
    auto mit = line_->find({-1, 0});
    if (mit == line_->end()) return;
    double c0 = mit->second.base[0];
    auto zit = line_->find({0, 0});
    if (zit == line_->end()) return;
    LineEntry& e = zit->second;
    for (int i = 0; i <= fam_.P(); ++i) {
      double& slot = e.base[fam_.idx(i, 0) * e.stride];
      slot = i == fam_.istar() ? c0 : slot + c0;
    }
  }

  const NestedFamily& fam_;
  bool corrected_;
  int nb_;
  std::map<std::pair<int, long long>, LineEntry>* line_ = nullptr;
  std::map<std::pair<int, long long>, std::vector<double>> full_;
};

// Reduced key: the element key with direction `dir` removed.
struct ReducedKey {
  MultiIndex n;
  CellIndex j;
  friend bool operator<(const ReducedKey& a, const ReducedKey& b)
  {
    if (a.n != b.n) return a.n < b.n;
    return a.j < b.j;
  }
};

void sweep_direction(GridND& g, int dir, bool descending)
{
  const NestedFamily& fam = *g.family();
  const int d = g.dim();
  std::map<ReducedKey, std::vector<ElementKey>> groups;
  for (const auto& [key, blk] : g.all()) {
    ReducedKey r;
    for (int m = 0; m < d; ++m)
      if (m != dir) {
        r.n.push_back(key.n[m]);
        r.j.push_back(key.j[m]);
      }
    groups[std::move(r)].push_back(key);
  }
  LineTransform lt(fam, g.mode() == Mode::corrected);
  for (auto& [red, keys] : groups) {
    // All keys in a group share the complementary block shape; the combo
    // count and the stride of `dir` are therefore common.
    std::size_t combos = 1;
    for (int v : red.n) combos *= g.local_size(v);
    std::size_t stride = 1;
    for (int m = dir + 1, t = dir; m < d; ++m, ++t) stride *= g.local_size(red.n[t]);
    for (std::size_t co = 0; co < combos; ++co) {
      // row-major offset of this combo with the dir axis removed
      std::size_t inner = stride == 0 ? 0 : co % stride;
      std::size_t outer = stride == 0 ? 0 : co / stride;
      std::map<std::pair<int, long long>, LineEntry> line;
      for (const auto& key : keys) {
        auto& blk = g.block(key);
        int ls = g.local_size(key.n[dir]);
        std::size_t base = outer * stride * ls + inner;
        line[{key.n[dir], key.j[dir]}] =
            LineEntry{key.n[dir], key.j[dir], blk.data() + base, stride, ls};
      }
      lt.run(line, descending);
    }
  }
}

GridND sweep_all(const GridND& in, bool descending, const std::vector<int>& order)
{
  if (!in.downward_closed())
    throw std::invalid_argument("key set is not downward closed");
  std::vector<int> dirs = order;
  if (dirs.empty()) {
    dirs.resize(in.dim());
    std::iota(dirs.begin(), dirs.end(), 0);
  }
  if (static_cast<int>(dirs.size()) != in.dim())
    throw std::invalid_argument("sweep order must list each dimension once");
  GridND out = in;
  for (int dir : dirs) sweep_direction(out, dir, descending);
  return out;
}

} // namespace

SurplusStore fast_values_to_surplus(const ValueGridND& v, const std::vector<int>& order)
{
  GridND g = sweep_all(v, true, order);
  SurplusStore s(v.family(), v.dim(), v.mode());
  static_cast<GridND&>(s) = std::move(g);
  return s;
}

ValueGridND fast_surplus_to_values(const SurplusStore& s, const std::vector<int>& order)
{
  GridND g = sweep_all(s, false, order);
  ValueGridND v(s.family(), s.dim(), s.mode());
  static_cast<GridND&>(v) = std::move(g);
  return v;
}

namespace {

// Per-call cache of 1D basis evaluations: for each (dim, level) the
// containing cell and the K+1 wavelet values at that coordinate.
struct EvalCache {
  struct Slot {
    bool ready = false;
    long long cell = 0;
    std::vector<double> vals;
  };
  std::vector<Slot> slots; // indexed (m * (Nmax+2)) + (n+1)
  int levels = 0;

  Slot& at(int m, int n) { return slots[m * levels + (n + 1)]; }
};

template <typename Coord>
long long containing_cell(const Coord& x, int n);

template <>
long long containing_cell<double>(const double& x, int n)
{
  long long j = static_cast<long long>(std::floor(std::ldexp(x, n - 1)));
  return std::clamp(j, 0LL, level_cells(n) - 1);
}

template <>
long long containing_cell<SidedPoint>(const SidedPoint& x, int n)
{
  Rational t = x.loc * Rational(1LL << (n - 1));
  long long j = t.numerator() / t.denominator();
  if (Rational(j) == t && x.side == Side::left) --j;
  return std::clamp(j, 0LL, level_cells(n) - 1);
}

template <typename Coord>
double eval_impl(const SurplusStore& s, const std::vector<Coord>& x, const MultiIndex& deriv)
{
  const NestedFamily& fam = *s.family();
  const int d = s.dim();
  int maxlev = 0;
  for (const auto& n : s.level_vectors()) maxlev = std::max(maxlev, norm_inf(n));
  EvalCache cache;
  cache.levels = maxlev + 2;
  cache.slots.resize(static_cast<std::size_t>(d) * cache.levels);
  auto dv = [&](int m) { return deriv.empty() ? 0 : deriv[m]; };
  ElementKey key;
  key.n.resize(d);
  key.j.resize(d);
  double acc = 0;
  for (const auto& n : s.level_vectors()) {
    key.n = n;
    bool zero = false;
    for (int m = 0; m < d && !zero; ++m) {
      if (n[m] == -1) {
        key.j[m] = 0;
        continue;
      }
      auto& slot = cache.at(m, n[m]);
      if (!slot.ready) {
        slot.ready = true;
        slot.cell = n[m] >= 1 ? containing_cell(x[m], n[m]) : 0;
        slot.vals.resize(fam.block_size());
        for (int i = 0; i <= fam.P(); ++i)
          for (int l = 0; l <= fam.M(); ++l)
            slot.vals[fam.idx(i, l)] =
                fam.eval_basis(NestedFamily::Kind::wavelet, i, l, dv(m), n[m], slot.cell,
                               x[m]);
      }
      key.j[m] = slot.cell;
    }
    const auto* blk = s.find(key);
    if (!blk) continue;
    std::vector<int> sizes(d), loc(d);
    for (int m = 0; m < d; ++m) sizes[m] = s.local_size(n[m]);
    for (std::size_t off = 0; off < blk->size(); ++off) {
      if ((*blk)[off] == 0.0) continue;
      decompose(off, sizes, loc);
      double prod = (*blk)[off];
      for (int m = 0; m < d && prod != 0.0; ++m) {
        if (n[m] == -1)
          prod *= dv(m) == 0 ? 1.0 : 0.0;
        else
          prod *= cache.at(m, n[m]).vals[loc[m]];
      }
      acc += prod;
    }
  }
  return acc;
}

} // namespace

double eval_interp_nd(const SurplusStore& s, const std::vector<double>& x,
                      const MultiIndex& deriv)
{
  return eval_impl(s, x, deriv);
}

double eval_interp_nd(const SurplusStore& s, const std::vector<SidedPoint>& x,
                      const MultiIndex& deriv)
{
  return eval_impl(s, x, deriv);
}

double integrate_nd(const SurplusStore& s)
{
  const NestedFamily& fam = *s.family();
  const int d = s.dim();
  double acc = 0;
  std::vector<int> sizes(d), loc(d);
  for (const auto& [key, blk] : s.all()) {
    for (int m = 0; m < d; ++m) sizes[m] = s.local_size(key.n[m]);
    for (std::size_t off = 0; off < blk.size(); ++off) {
      if (blk[off] == 0.0) continue;
      decompose(off, sizes, loc);
      double w = 1;
      for (int m = 0; m < d; ++m) {
        int n = key.n[m];
        if (n == -1) continue; // weight 1
        int i = loc[m] / (fam.M() + 1), l = loc[m] % (fam.M() + 1);
        if (n == 0)
          w *= to_double(fam.quad_phi(i, l));
        else
          w *= std::ldexp(to_double(fam.quad_psi(i, l)), -(l + 1) * (n - 1));
      }
      acc += blk[off] * w;
    }
  }
  return acc;
}

void dump_grid(const GridND& g, std::ostream& os)
{
  const NestedFamily& fam = *g.family();
  const int d = g.dim();
  std::vector<ElementKey> keys;
  for (const auto& [key, blk] : g.all()) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  std::vector<int> iv(d);
  for (const auto& key : keys) {
    long long pts = 1;
    for (int m = 0; m < d; ++m) pts *= key.n[m] == -1 ? 1 : fam.P() + 1;
    for (long long p = 0; p < pts; ++p) {
      long long t = p;
      for (int m = d - 1; m >= 0; --m) {
        int np = key.n[m] == -1 ? 1 : fam.P() + 1;
        iv[m] = static_cast<int>(t % np);
        t /= np;
      }
      auto x = point_location_nd(fam, key, iv);
      for (int m = 0; m < d; ++m) os << (m ? "," : "") << to_double(x[m].loc);
      os << "," << norm1(key.n) << "\n";
    }
  }
}

} // namespace spcol
