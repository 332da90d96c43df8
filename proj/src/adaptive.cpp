#include "spcol/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace spcol {

namespace {

// True for entries whose basis function is replaced by the constant in the
// corrected hierarchy (level-0 anchor slot in any dimension).
bool structural_zero(const NestedFamily& fam, const ElementKey& key,
                     const std::vector<int>& iv, const std::vector<int>& lv)
{
  for (std::size_t m = 0; m < key.n.size(); ++m)
    if (key.n[m] == 0 && iv[m] == fam.istar() && lv[m] == 0) return true;
  return false;
}


// Inserts key (and, recursively, any missing parents) and computes its
// surplus block: sampled value minus the prediction of the current
// interpolant. Every other stored element either is an ancestor or has a
// basis function vanishing at the new points, so the prediction is exact.
void insert_element(AdaptiveTables& t, const ElementKey& key, const SamplerND& f)
{
  if (t.contains(key)) return;
  const NestedFamily& fam = *t.family();
  int d = t.dim();
  for (int m = 0; m < d; ++m)
    if (key.n[m] > -1) insert_element(t, parent_key(key, m), f);

  auto& blk = t.insert(key);
  std::vector<int> iv(d), lv(d);
  for (std::size_t off = 0; off < blk.size(); ++off) {
    split_entry(fam, key, off, iv, lv);
    if (structural_zero(fam, key, iv, lv)) continue;
    auto pt = point_location_nd(fam, key, iv);
    blk[off] = f(pt, lv) - eval_interp_nd(t.surpluses(), pt, lv);
  }
}

} // namespace

void ensure_element(AdaptiveTables& t, const ElementKey& key, const SamplerND& f)
{
  insert_element(t, key, f);
}

long long AdaptiveTables::dof() const
{
  long long total = 0;
  for (const auto& [key, blk] : store_.all())
    for (double v : blk)
      if (v != 0.0) ++total;
  return total;
}

std::vector<double>& AdaptiveTables::insert(const ElementKey& key)
{
  auto& blk = store_.block(key);
  leaves_.insert(key);
  for (int m = 0; m < dim(); ++m)
    if (key.n[m] > -1) {
      auto parent = parent_key(key, m);
      if (++child_count_[parent] == 1) leaves_.erase(parent);
    }
  return blk;
}

std::vector<ElementKey> children(const ElementKey& key, int n_max)
{
  std::vector<ElementKey> out;
  for (std::size_t m = 0; m < key.n.size(); ++m) {
    if (key.n[m] >= n_max) continue;
    ElementKey c = key;
    c.n[m] = key.n[m] + 1;
    if (key.n[m] <= 0) {
      c.j[m] = 0;
      out.push_back(c);
    } else {
      c.j[m] = 2 * key.j[m];
      out.push_back(c);
      c.j[m] += 1;
      out.push_back(c);
    }
  }
  return out;
}

double element_indicator(const NestedFamily& fam, const ElementKey& key,
                         const std::vector<double>& block, const Criterion& c)
{
  int d = static_cast<int>(key.n.size());
  std::vector<int> iv(d), lv(d);
  double acc = 0;
  for (std::size_t off = 0; off < block.size(); ++off) {
    if (block[off] == 0.0) continue;
    split_entry(fam, key, off, iv, lv);
    double nrm = 1;
    for (int m = 0; m < d; ++m) {
      auto b = fam.psi_norm(iv[m], lv[m], key.n[m]);
      nrm *= c.norm == CritNorm::L1 ? b.l1 : c.norm == CritNorm::L2 ? b.l2 : b.linf;
    }
    double term = std::abs(block[off]) * nrm;
    acc += c.norm == CritNorm::L2 ? term * term : term;
  }
  return c.norm == CritNorm::L2 ? std::sqrt(acc) : acc;
}

AdaptiveTables adaptive_interpolate(const SamplerND& f, FamilyPtr family, int d, int n_max,
                                    const Criterion& c, bool coarsen)
{
  AdaptiveTables t(std::move(family), d, n_max);
  // seed the {-1,0}^d hull so refinement is driven by deviations from the
  // constant, not by the constant itself
  ElementKey seed;
  seed.n.assign(d, 0);
  seed.j.assign(d, 0);
  insert_element(t, seed, f);

  // scan any element still missing children; a leaf-only scan can stall in
  // d >= 3 where the lone all-zeros hull leaf has a near-zero tensor surplus
  // while the boundary elements carry the error
  bool added = true;
  while (added) {
    added = false;
    std::vector<ElementKey> scan;
    for (const auto& [key, blk] : t.surpluses().all()) scan.push_back(key);
    std::sort(scan.begin(), scan.end());
    for (const auto& key : scan) {
      const auto* blk = t.surpluses().find(key);
      if (element_indicator(*t.family(), key, *blk, c) <= c.epsilon) continue;
      for (const auto& child : children(key, n_max))
        if (!t.contains(child)) {
          insert_element(t, child, f);
          added = true;
        }
    }
  }
  if (coarsen) coarsen_points(t, c);
  return t;
}

RefineReport refine_evolving(AdaptiveTables& t, const Criterion& c, const SamplerND& provider)
{
  RefineReport rep;
  std::vector<ElementKey> scan;
  for (const auto& [key, blk] : t.surpluses().all()) scan.push_back(key);
  std::sort(scan.begin(), scan.end());
  std::size_t before = t.surpluses().all().size();
  for (const auto& key : scan) {
    const auto* blk = t.surpluses().find(key);
    if (element_indicator(*t.family(), key, *blk, c) <= c.epsilon) continue;
    for (const auto& child : children(key, t.n_max()))
      if (!t.contains(child)) insert_element(t, child, provider);
  }
  rep.added_elements = t.surpluses().all().size() - before;
  return rep;
}

std::size_t coarsen_points(AdaptiveTables& t, const Criterion& c)
{
  const NestedFamily& fam = *t.family();
  int d = t.dim();
  double eta = c.coarsen_threshold();
  std::size_t removed = 0;
  std::vector<int> iv(d), lv(d);
  for (auto& [key, blk] : t.surpluses().all()) {
    if (*std::max_element(key.n.begin(), key.n.end()) == -1) continue; // keep the root
    for (std::size_t off = 0; off < blk.size(); ++off) {
      split_entry(fam, key, off, iv, lv);
      if (structural_zero(fam, key, iv, lv)) continue;
      double nrm = 1;
      for (int m = 0; m < d; ++m) {
        auto b = fam.psi_norm(iv[m], lv[m], key.n[m]);
        nrm *= c.norm == CritNorm::L1 ? b.l1 : c.norm == CritNorm::L2 ? b.l2 : b.linf;
      }
      if (std::abs(blk[off]) * nrm < eta) {
        blk[off] = 0;
        ++removed;
      }
    }
  }
  return removed;
}

void dump_table(const AdaptiveTables& t, const Criterion& c, std::ostream& os)
{
  std::vector<ElementKey> keys;
  for (const auto& [key, blk] : t.surpluses().all()) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  for (const auto& key : keys) {
    for (std::size_t m = 0; m < key.n.size(); ++m) os << (m ? "," : "") << key.n[m];
    os << ";";
    for (std::size_t m = 0; m < key.j.size(); ++m) os << (m ? "," : "") << key.j[m];
    os << ";" << element_indicator(*t.family(), key, *t.surpluses().find(key), c) << ";"
       << (t.leaves().count(key) ? 1 : 0) << "\n";
  }
}

} // namespace spcol
