#pragma once

#include "obstacle/data.hpp"
#include "obstacle/spaces.hpp"

namespace obstacle {

// quad_order <= 0 selects the data order (6, or 8 on interface elements)
P0Field project_p0(const ScalarData& f, const Mesh& m, int quad_order = 0);
P1dField project_p1d(const ScalarData& f, const Mesh& m, int quad_order = 0);
// edge DOFs = int_E q . n_E
RT0Field interpolate_rt0(const VectorFn& q, const Mesh& m, int line_order = 7);
// nodal interpolation into P1c (boundary values kept as given)
P1cField interpolate_p1c(const ScalarData& f, const Mesh& m);

// int_T f over every triangle
Vector element_integrals(const ScalarData& f, const Mesh& m, int quad_order = 0);
// int_T f * lambda_k, 3 per triangle
Vector element_p1_moments(const ScalarData& f, const Mesh& m, int quad_order = 0);

int element_order(const ScalarData& f, const std::array<Vec2, 3>& c, int quad_order);

// Local P1 mass matrix times |T| weights: (1 + delta_ij) |T| / 12.
inline double p1_mass(double area, int i, int j) { return area * (i == j ? 2.0 : 1.0) / 12.0; }

}  // namespace obstacle
