#pragma once

#include "spcol/sparse_nd.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace spcol {

/// Counter-based splitmix64 generator; fixed seeds make every sampled
/// quantity reproducible.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed = 42) : state_(seed) {}

  std::uint64_t next()
  {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

private:
  std::uint64_t state_;
};

/// f with mixed derivative orders at plain coordinates (no side tags);
/// used for error sampling away from kinks.
using SamplerDbl = std::function<double(const std::vector<double>&, const std::vector<int>&)>;

struct ErrorReport {
  double l1 = 0, l2 = 0, linf = 0, h1 = 0;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Monte-Carlo error norms of the sparse interpolant against f_true; H1 is
/// the broken seminorm using analytic gradients of f_true and derivative
/// evaluation of the interpolant.
ErrorReport sampled_errors(const SamplerDbl& f_true, const SurplusStore& interp,
                           int samples = 100000, std::uint64_t seed = 42);

struct ConvergenceRow {
  int N = 0;       // level budget of the sparse space
  double h = 0;    // 2^-(N+1), the printed mesh size of an (N+1)-level grid
  ErrorReport err;
};

/// Errors over an ascending range of level budgets; orders between
/// consecutive rows are log2 ratios (emitted by the CSV writer).
std::vector<ConvergenceRow> convergence_table(const SamplerND& f_sided,
                                              const SamplerDbl& f_true, FamilyPtr family,
                                              int d, const std::vector<int>& n_range,
                                              Mode mode = Mode::standard,
                                              int samples = 100000,
                                              std::uint64_t seed = 42);

/// Header N,h,L1,L1_order,L2,L2_order,Linf,Linf_order,H1,H1_order.
void emit_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& os);

/// Per-definition hierarchical transform (triangular solve in ascending
/// level order, O(DoF^2)); the oracle for the fast sweeps. Guarded to
/// small instances.
SurplusStore dense_oracle_surplus(const ValueGridND& v);

/// Least-squares slope of y against x (both already in the desired scale).
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace spcol
