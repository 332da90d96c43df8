#pragma once

#include "spcol/adaptive.hpp"
#include "spcol/analysis.hpp"

#include <array>
#include <string>

namespace spcol {

/// Benchmark target with closed-form value and mixed derivatives (orders
/// 0/1 per dimension): `sided` honors side tags at kinks and jumps, `plain`
/// takes raw coordinates.
struct TestFunction {
  std::string name;
  int d = 1;
  SamplerND sided;
  SamplerDbl plain;
};

/// Registry: f0 = exp(sin(2pi(x1+x2))), f1 = 1/(|0.3-x1^2-x2^2|+0.1)
/// (both d=2), f2/f3 = separable exponentials with rates c_i = 1/2^(i+2),
/// f4 = exp(sum c_i x_i) cut off where x1 > 1/2 or x2 > 1/2.
TestFunction test_function(const std::string& name, int d);

// ---------------------------------------------------------------- elliptic

/// Two-point stochastic diffusion benchmark: (a u')' = 0 on (0,1) with
/// u(0)=0, u(1)=1 and a(y,x) = 1 + sigma sum_k cos(2 pi k x) y_k / (k pi)^2,
/// y uniform on [-1,1]^d. sigma < 6 keeps a positive.
struct EllipticConfig {
  int d = 2;
  double sigma = 4.0;
  int n_cheb = 31;
};

/// Chebyshev nodes on [0,1], ascending.
std::vector<double> cheb_nodes(int n);

/// Solves the two-point boundary value problem for one sample y by
/// Chebyshev collocation; returns u at the nodes of cheb_nodes(n_cheb).
std::vector<double> elliptic_solve_at(const std::vector<double>& y,
                                      const EllipticConfig& cfg);

/// Flux a u' at the Chebyshev nodes; constant in x for the exact solution.
std::vector<double> elliptic_flux_at(const std::vector<double>& y,
                                     const EllipticConfig& cfg);

struct EllipticMoments {
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> variance;
};

/// Sparse-collocates u and u^2 over the random space mapped to [0,1]^d and
/// integrates for per-node mean and variance. Lagrange families only.
EllipticMoments elliptic_moments(const EllipticConfig& cfg, FamilyPtr family, int N,
                                 Mode mode = Mode::standard);

// ------------------------------------------------------- Kraichnan-Orszag

/// Random-input cases of the three-mode problem
///   y1' = y1 y3,  y2' = -y2 y3,  y3' = -y1^2 + y2^2.
/// 1: y(0) = (1, 0.1 Y, 0); 2: y(0) = (1, 0.1 Y1, Y2); 3: y(0) = Y.
/// State layout: the three modes, then (for Hermite runs) their derivative
/// blocks: case 1 appends (yi)_Y (6 states); case 2 appends (yi)_Y1,
/// (yi)_Y2, (yi)_Y1Y2 (12 states).
struct KOConfig {
  int random_dims = 1; // 1, 2 or 3
  CritNorm norm = CritNorm::L2;
  double dt = 0.01;
  double t_end = 30.0;
  double eps = 1e-4;
  int n_max = 10;
  FamilyPtr family;
  int output_stride = 10; // record every this many steps
};

/// Right-hand side; state size selects the plain (3), 1D Hermite (6) or
/// 2D Hermite (12) system.
std::vector<double> ko_rhs(const std::vector<double>& state);

/// One SSP-RK3 step of ko_rhs.
void ko_step(std::vector<double>& state, double dt);

/// Initial state for the case, at random sample Y in [-1,1]^dims;
/// `hermite` appends the derivative blocks (cases 1 and 2 only).
std::vector<double> ko_initial(int random_dims, const std::vector<double>& Y, bool hermite);

struct KOSeries {
  std::vector<double> t;
  std::array<std::vector<double>, 3> var; // per mode
  std::vector<long long> dof;
  std::vector<std::vector<double>> final_points; // Y coordinates at t_end
};

/// Adaptive collocation evolution: per-point ODE solves, per-step surplus
/// recomputation and refinement (new points replay from t=0), variance by
/// sparse quadrature of y and y^2.
KOSeries ko_run(const KOConfig& cfg);

} // namespace spcol
