#pragma once

#include "obstacle/data.hpp"
#include "obstacle/pdas.hpp"
#include "obstacle/spaces.hpp"

namespace obstacle {

struct PlateProblem {
  const Mesh* mesh = nullptr;
  ScalarData f, g;
  int quad_order = 0;
};

// Throws Error unless g < 0 on the sampled boundary.
void check_plate_boundary(const PlateProblem& p);

// Rows over the broken coefficients (kXDim per triangle) whose kernel is the
// divDiv-conforming subspace: per interior edge the independent moments of the
// jumps of n.N.n and of the effective shear n.div N + d_t(t.N.n); per interior
// vertex the sum of the corner jumps of t.N.n.
struct DivDivConstraints {
  SparseMatrix C;
  int edge_rows = 0;
  int vertex_rows = 0;
  int rows() const { return static_cast<int>(C.rows()); }
};

DivDivConstraints build_divdiv_constraints(const Mesh& m);

// Per-element blocks of the discrete plate forms.
struct PlateLocal {
  Eigen::Matrix<double, kXDim, kXDim> A;  // <N_a, N_b>_T
  Eigen::Matrix<double, 3, kXDim> D;      // <divDiv N_a, eta_i>_T
  Eigen::Matrix3d M;                      // P1 mass
};
PlateLocal plate_local(const Mesh& m, int t);

// Unknowns after condensing the moment block: [kappa | u | lambda].
struct PlateSystem {
  ComplementaritySystem sys;
  DivDivConstraints cons;
  std::vector<PlateLocal> local;
  int off_kappa = 0, off_u = 0, off_lambda = 0;
  Vector rhs_f;   // <f, eta_i>_T
  Vector mom_g;   // <g, eta_i>_T
};

PlateSystem assemble_plate(const PlateProblem& p);

struct PlateSolution {
  XField M;
  P1dField lambda;
  P1dField u;
  Vector kappa;
  std::vector<char> active;
  int iterations = 0;
};

// moment coefficients from (kappa, u) through the element-wise elimination
XField recover_moments(const PlateSystem& ps, const Mesh& m, const Vector& kappa, const Vector& u);
PlateSolution solve_plate(const PlateProblem& p, const PdasConfig& cfg);
PlateSolution solve_plate(const PlateProblem& p, const PlateSystem& ps, const PdasConfig& cfg);

// dim X(T) * #T - rank C + 6 #T (rank assumed full, verified in tests)
long plate_dofs(const Mesh& m, const DivDivConstraints& c);

struct PlateProperties {
  double divdiv = 0;          // || divDiv M_h - lambda_h - Pi1 f ||
  double orthogonality = 0;   // max over the constrained space of the first equation
  double complementarity = 0; // |(lambda_h, u_h - g)|
  double constraint = 0;      // || C m ||_inf
  double min_lambda = 0;      // min nodal value of lambda_h
  double min_residual = 0;    // min_i r_i / scale_i
  double scale = 1;
};

PlateProperties check_plate_properties(const PlateSolution& s, const PlateProblem& p);

struct PlateErrors {
  double u = 0, M = 0;
  double lambda_dual = -1;
};

PlateErrors plate_errors(const PlateSolution& s, const PlateProblem& p, const ScalarData& u_exact,
                         const ScalarData* lambda_exact = nullptr, int dual_ref_levels = 0);

}  // namespace obstacle
