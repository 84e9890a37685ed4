#pragma once

#include "obstacle/data.hpp"
#include "obstacle/pdas.hpp"
#include "obstacle/spaces.hpp"

namespace obstacle {

struct MembraneProblem {
  const Mesh* mesh = nullptr;
  ScalarData f, g;
  int quad_order = 0;  // 0: data-dependent (6, or 8 on interface elements)
};

// Throws Error if g > 1e-12 somewhere on the sampled boundary.
void check_membrane_boundary(const MembraneProblem& p);

// Unknowns: [sigma (edges) | u (triangles) | lambda (triangles)].
struct MembraneSystem {
  ComplementaritySystem sys;
  int off_sigma = 0, off_u = 0, off_lambda = 0;
  Vector int_f, int_g;  // element integrals
};

MembraneSystem assemble_membrane(const MembraneProblem& p);
// RT0 mass matrix (edges x edges)
SparseMatrix rt0_mass(const Mesh& m);

struct MembraneSolution {
  RT0Field sigma;
  P0Field lambda;
  P0Field u;
  std::vector<char> active;
  int iterations = 0;
};

MembraneSolution solve_membrane(const MembraneProblem& p, const PdasConfig& cfg);

struct MembraneProperties {
  double divergence = 0;       // max_T |div sigma + lambda + Pi0 f|
  double orthogonality = 0;    // max over RT0 basis of <sigma, tau> + <div tau, u>
  double complementarity = 0;  // |<lambda, u - g>|
  double feasibility = 0;      // min_T (u_T - (Pi0 g)_T)
  double scale = 1;            // magnitude used for relative thresholds
};

MembraneProperties check_membrane_properties(const MembraneSolution& s, const MembraneProblem& p);

struct MembraneErrors {
  double u = 0, sigma = 0, divergence = 0;
  double lambda_dual = -1;  // < 0 when not requested
};

// `dual_ref_levels` > 0 also evaluates the discrete H^{-1} surrogate of
// lambda - lambda_h on a mesh that many uniform refinements finer.
MembraneErrors membrane_errors(const MembraneSolution& s, const MembraneProblem& p,
                               const ScalarData& u_exact, const ScalarData& lambda_exact,
                               int dual_ref_levels = 0);

}  // namespace obstacle
