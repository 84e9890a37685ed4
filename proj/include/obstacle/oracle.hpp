#pragma once

// Reference computations for tests. Nothing here reuses the assembly,
// quadrature or solver code of the main modules; only the mesh and the
// local basis evaluators (P1, sym(RT0 x RT1), HCT) are shared.

#include <functional>

#include "obstacle/data.hpp"
#include "obstacle/pdas.hpp"
#include "obstacle/spaces.hpp"

namespace obstacle {

// Projected Gauss-Seidel for the conforming P1 obstacle problem with nodal
// constraints u(z) >= g(z); ascending vertex order, no relaxation.
struct PrimalResult {
  P1cField u;
  int sweeps = 0;
  double kkt_residual = 0;
};
PrimalResult primal_p1_obstacle(const Mesh& m, const ScalarData& f, const ScalarData& g,
                                double tol = 1e-10, int max_sweeps = 200000);

struct BruteForceResult {
  Vector x;
  std::vector<char> active;
  int feasible = 0;  // number of feasible active sets found
};
struct NoFeasibleSet : Error {
  using Error::Error;
};
struct MultipleFeasibleSets : Error {
  using Error::Error;
};
// Enumerates all 2^m active sets with dense LU solves.
BruteForceResult brute_force_active_set(const ComplementaritySystem& sys, double tol = 1e-12);

// mu(v) = sum_T int_T rho(x, T) v over the coarse triangles T.
using Density = std::function<double(const Vec2& x, int coarse_triangle)>;
// order 1: ||grad w|| with w in P1 cap H^1_0; order 2: ||hess w|| with w in
// HCT cap H^2_0; both on `coarse` refined uniformly `ref_levels` times.
double discrete_dual_norm(const Mesh& coarse, const Density& mu, int order, int ref_levels = 2);

// max over `trials` random bumps of |sum_T int_T divDiv N phi - <N, hess phi>|,
// relative to ||N|| ||hess phi||.
double divdiv_pairing_check(const Mesh& m, const XField& N, int trials, unsigned seed = 7);

}  // namespace obstacle
