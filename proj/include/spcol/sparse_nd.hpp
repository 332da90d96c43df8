#pragma once

#include "spcol/family.hpp"

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace spcol {

/// Level or cell multi-index.
using MultiIndex = std::vector<int>;
using CellIndex = std::vector<long long>;

inline int norm1(const MultiIndex& n)
{
  int s = 0;
  for (int v : n) s += v;
  return s;
}
/// Level budget used for admissibility: level -1 blocks are constants and
/// do not consume refinement budget.
inline int norm1_active(const MultiIndex& n)
{
  int s = 0;
  for (int v : n) s += std::max(v, 0);
  return s;
}
inline int norm_inf(const MultiIndex& n)
{
  int m = 0;
  for (int v : n) m = std::max(m, v);
  return m;
}

enum class Mode { standard, corrected };

/// One increment block W_n at cells j (per-dimension: 1 cell for n in
/// {-1,0}, 2^{n-1} cells for n >= 1).
struct ElementKey {
  MultiIndex n;
  CellIndex j;
  friend bool operator==(const ElementKey&, const ElementKey&) = default;
  friend bool operator<(const ElementKey& a, const ElementKey& b)
  {
    if (a.n != b.n) return a.n < b.n;
    return a.j < b.j;
  }
};

struct ElementKeyHash {
  std::size_t operator()(const ElementKey& k) const
  {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    for (int v : k.n) mix(static_cast<std::uint64_t>(v) + 2);
    for (long long v : k.j) mix(static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

inline long long level_cells(int n) { return n >= 1 ? 1LL << (n - 1) : 1; }

/// The admissible level set of the sparse space: standard {n >= 0,
/// |n|_1 <= N}, corrected {-1 <= n <= N, active budget <= N-d+1}.
struct SparseIndexSet {
  int d = 1;
  int N = 0;
  Mode mode = Mode::standard;

  int min_level() const { return mode == Mode::corrected ? -1 : 0; }
  int budget() const { return mode == Mode::corrected ? N - d + 1 : N; }
  bool contains(const MultiIndex& n) const
  {
    for (int v : n)
      if (v < min_level() || v > N) return false;
    return norm1_active(n) <= budget();
  }
};

/// Keyed block container shared by point values and surpluses. Block layout
/// is row-major over dimensions; the per-dimension local size is 1 for
/// level -1 and (P+1)(M+1) otherwise, local index idx(i,l).
class GridND {
public:
  GridND(FamilyPtr family, int d, Mode mode)
      : fam_(std::move(family)), d_(d), mode_(mode)
  {
  }

  const FamilyPtr& family() const { return fam_; }
  int dim() const { return d_; }
  Mode mode() const { return mode_; }
  int min_level() const { return mode_ == Mode::corrected ? -1 : 0; }

  int local_size(int n) const { return n == -1 ? 1 : fam_->block_size(); }
  std::size_t block_size(const MultiIndex& n) const
  {
    std::size_t s = 1;
    for (int v : n) s *= local_size(v);
    return s;
  }

  /// Inserts (or finds) the block for key, zero-initialized.
  std::vector<double>& block(const ElementKey& key)
  {
    auto [it, inserted] = blocks_.try_emplace(key);
    if (inserted) {
      it->second.assign(block_size(key.n), 0.0);
      level_vectors_.insert(key.n);
    }
    return it->second;
  }
  const std::vector<double>* find(const ElementKey& key) const
  {
    auto it = blocks_.find(key);
    return it == blocks_.end() ? nullptr : &it->second;
  }
  bool contains(const ElementKey& key) const { return blocks_.count(key) > 0; }

  const std::unordered_map<ElementKey, std::vector<double>, ElementKeyHash>& all() const
  {
    return blocks_;
  }
  std::unordered_map<ElementKey, std::vector<double>, ElementKeyHash>& all()
  {
    return blocks_;
  }
  const std::set<MultiIndex>& level_vectors() const { return level_vectors_; }

  std::size_t dof() const
  {
    std::size_t s = 0;
    for (const auto& [k, b] : blocks_) s += b.size();
    return s;
  }

  /// Every parent of every key must be present for the fast sweeps.
  bool downward_closed() const;

private:
  FamilyPtr fam_;
  int d_;
  Mode mode_;
  std::unordered_map<ElementKey, std::vector<double>, ElementKeyHash> blocks_;
  std::set<MultiIndex> level_vectors_;
};

struct ValueGridND : GridND {
  using GridND::GridND;
};
struct SurplusStore : GridND {
  using GridND::GridND;
};

/// Per-dimension parent of a key (level n_m lowered by one); n_m at the
/// container's min level has no parent in that dimension.
ElementKey parent_key(const ElementKey& key, int m);

/// f with mixed derivative orders, honoring side tags per coordinate.
using SamplerND =
    std::function<double(const std::vector<SidedPoint>&, const std::vector<int>&)>;

/// Location of the collocation point of element `key`, local point index i.
std::vector<SidedPoint> point_location_nd(const NestedFamily& fam, const ElementKey& key,
                                          const std::vector<int>& i);

/// Splits a flat block offset into per-dimension point and derivative
/// indices (level -1 dimensions map to (0,0)).
void split_entry(const NestedFamily& fam, const ElementKey& key, std::size_t off,
                 std::vector<int>& iv, std::vector<int>& lv);

/// Tensor-product basis function of one element entry, mixed derivative
/// `deriv`. The sided overload honors tags; the double overload uses the
/// right-limit convention.
double eval_basis_nd(const NestedFamily& fam, const ElementKey& key,
                     const std::vector<int>& iv, const std::vector<int>& lv,
                     const std::vector<SidedPoint>& x, const std::vector<int>& deriv);
double eval_basis_nd(const NestedFamily& fam, const ElementKey& key,
                     const std::vector<int>& iv, const std::vector<int>& lv,
                     const std::vector<double>& x, const std::vector<int>& deriv);

/// All element keys of the admissible set, lexicographic in (n, j).
std::vector<ElementKey> enumerate_sparse_elements(int d, int N, const NestedFamily& fam,
                                                  Mode mode);

/// Closed-form dimension of the sparse space; equals the total block size
/// over enumerate_sparse_elements.
long long sparse_dim(int d, int N, int K, Mode mode);

/// Samples f at every collocation point of the sparse space.
ValueGridND collocate(const SamplerND& f, const SparseIndexSet& space, FamilyPtr family);

/// Fast d-dimensional transforms: one 1D pyramid sweep per direction over
/// the lines of the key set. Work on any downward-closed key set. The
/// direction order is arbitrary (results agree to rounding); pass `order`
/// to exercise a specific permutation.
SurplusStore fast_values_to_surplus(const ValueGridND& v,
                                    const std::vector<int>& order = {});
ValueGridND fast_surplus_to_values(const SurplusStore& s,
                                   const std::vector<int>& order = {});

/// Mixed derivative `deriv` of the sparse interpolant at x; one cell per
/// stored level vector. Plain doubles use the right-limit convention
/// (left limit at x=1); the sided overload honors tags.
double eval_interp_nd(const SurplusStore& s, const std::vector<double>& x,
                      const MultiIndex& deriv = {});
double eval_interp_nd(const SurplusStore& s, const std::vector<SidedPoint>& x,
                      const MultiIndex& deriv = {});

/// Sparse quadrature: sum of surpluses times tensor-product weights.
double integrate_nd(const SurplusStore& s);

/// One collocation point per line: comma-separated coordinates, then the
/// active level budget |n|_1.
void dump_grid(const GridND& g, std::ostream& os);

} // namespace spcol
