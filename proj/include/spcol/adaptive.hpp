#pragma once

#include "spcol/sparse_nd.hpp"

#include <cstddef>
#include <map>
#include <set>

namespace spcol {

enum class CritNorm { L1, L2, Linf };

/// Refinement criterion: an element is significant when its indicator
/// exceeds epsilon; point contributions below eta are coarsened away.
struct Criterion {
  CritNorm norm = CritNorm::L2;
  double epsilon = 1e-4;
  double eta = 0; // 0 means the default epsilon/10

  double coarsen_threshold() const { return eta > 0 ? eta : epsilon / 10; }
};

/// Adaptive interpolant state: downward-closed surplus table H plus the
/// leaf set L (elements with no stored children). Levels are capped at
/// n_max per dimension; elements at the cap are never refined further.
class AdaptiveTables {
public:
  AdaptiveTables(FamilyPtr family, int d, int n_max)
      : store_(std::move(family), d, Mode::corrected), n_max_(n_max)
  {
  }

  const SurplusStore& surpluses() const { return store_; }
  SurplusStore& surpluses() { return store_; }
  int dim() const { return store_.dim(); }
  int n_max() const { return n_max_; }
  const FamilyPtr& family() const { return store_.family(); }

  bool contains(const ElementKey& key) const { return store_.contains(key); }
  int child_count(const ElementKey& key) const
  {
    auto it = child_count_.find(key);
    return it == child_count_.end() ? 0 : it->second;
  }
  const std::set<ElementKey>& leaves() const { return leaves_; }

  /// Points carrying information: stored entries with a nonzero surplus
  /// (structural zeros and coarsened tombstones do not count).
  long long dof() const;

  /// Registers `key` in the bookkeeping; the caller fills the block.
  std::vector<double>& insert(const ElementKey& key);

private:
  SurplusStore store_;
  int n_max_;
  std::unordered_map<ElementKey, int, ElementKeyHash> child_count_;
  std::set<ElementKey> leaves_;
};

/// Children of an element: one per dimension at levels -1 and 0, the two
/// dyadic halves at levels >= 1; dimensions at the n_max cap contribute none.
std::vector<ElementKey> children(const ElementKey& key, int n_max);

/// Criterion left-hand side for one element: sum of |b| times the global
/// basis norm (L1, Linf) or the root of the squared sum (L2).
double element_indicator(const NestedFamily& fam, const ElementKey& key,
                         const std::vector<double>& block, const Criterion& c);

/// Adaptive multiresolution interpolation: seed the constant/base hull,
/// refine significant leaves to a fixpoint, optionally coarsen points.
AdaptiveTables adaptive_interpolate(const SamplerND& f, FamilyPtr family, int d, int n_max,
                                    const Criterion& c, bool coarsen = false);

/// Inserts an element (and any missing parents), sampling its surpluses
/// from `f`; no-op when already present. Used to keep several tables on a
/// shared key set during coupled evolution.
void ensure_element(AdaptiveTables& t, const ElementKey& key, const SamplerND& f);

struct RefineReport {
  std::size_t added_elements = 0;
};

/// One refinement pass over the whole table (no fixpoint loop): children of
/// every significant element are added, with values pulled from `provider`.
RefineReport refine_evolving(AdaptiveTables& t, const Criterion& c,
                             const SamplerND& provider);

/// Zeroes point contributions with |b| * norm < eta (the root element is
/// kept); returns the number of removed points. The zeroed slots remain as
/// tombstones so the key set stays downward closed.
std::size_t coarsen_points(AdaptiveTables& t, const Criterion& c);

/// One element per line: "n-vector;j-vector;indicator;is-leaf".
void dump_table(const AdaptiveTables& t, const Criterion& c, std::ostream& os);

} // namespace spcol
