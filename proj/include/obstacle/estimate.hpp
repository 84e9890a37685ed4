#pragma once

#include <string>

#include "obstacle/membrane.hpp"
#include "obstacle/plate.hpp"
#include "obstacle/postproc.hpp"

namespace obstacle {

// Squared per-element indicators by family, plus global scalars.
struct EstimatorReport {
  std::vector<std::string> names;
  std::vector<Vector> local;    // squared, one entry per triangle
  std::vector<std::string> marking_terms;  // families summed for marking
  double xi_inf = 0;            // plate only
  double lambda_omega = 0;      // plate only: int lambda_h

  const Vector& operator[](const std::string& name) const;
  bool has(const std::string& name) const;
  double total(const std::string& name) const;  // sqrt(sum local^2)
  Vector marking() const;                       // sum of marking families
  double est() const { return std::sqrt(marking().sum()); }
};

struct MembranePost {
  ClementWeights weights;
  P1cField Ju;  // J_h u_h
};
MembranePost membrane_postprocess(const Mesh& m, const MembraneSolution& s);

// Families rho_r, rho_p, rho_c, osc (marking) and u_Ju = ||u_h - J_h u_h||_T^2.
EstimatorReport estimate_membrane(const MembraneSolution& s, const MembraneProblem& p,
                                  const P1cField& Ju);

// ||grad(u - J_h u_h)||
double membrane_postproc_error(const Mesh& m, const ScalarData& u_exact, const P1cField& Ju);

struct PlatePost {
  P3bField ustar;
  SmoothedField J;  // J_h^HCT u_h*
};
PlatePost plate_postprocess(const HctSpace& s, const PlateSolution& sol);

// Families xi_r, osc, xi_p, xi_c (marking); xi_inf and lambda_omega.
EstimatorReport estimate_plate(const PlateSolution& s, const PlateProblem& p, const HctSpace& space,
                               const PlatePost& post, double eps = 1e-10);

// Jump terms of a broken P3 field: per triangle h^-3 ||[v]||^2_dT + h^-1 ||[d_n v]||^2_dT,
// and per edge the pair (||[v]||_E, ||[d_n v]||_E). Boundary traces count as jumps.
struct P3Jumps {
  Vector element;
  std::vector<std::array<double, 2>> edge;
};
P3Jumps p3_jumps(const Mesh& m, const P3bField& v);

}  // namespace obstacle
