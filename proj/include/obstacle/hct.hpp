#pragma once

#include "obstacle/spaces.hpp"

namespace obstacle {

// Clough-Tocher macro element on one triangle, split at the centroid.
// Local DOFs: 3k, 3k+1, 3k+2 = value, d/dx, d/dy at vertex k; 9+k = derivative
// along the global normal of local edge k at its midpoint.
class HctElement {
 public:
  HctElement(const Mesh& m, int t);
  HctElement(const std::array<Vec2, 3>& corners, const std::array<Vec2, 3>& edge_normals);

  const ElementGeometry& geometry() const { return g_; }
  // sub-triangle i = (center, p_{i+1}, p_{i+2})
  std::array<Vec2, 3> sub_corners(int i) const;
  int locate(const Vec2& x) const;

  struct Eval {
    std::array<double, 12> v;
    std::array<Vec2, 12> g;
    std::array<Mat2, 12> h;
  };
  Eval eval(const Vec2& x) const { return eval(locate(x), x); }
  Eval eval(int sub, const Vec2& x) const;

  // residual of the local C1 / DOF system (diagnostic)
  double construction_residual() const { return residual_; }

 private:
  void build(const std::array<Vec2, 3>& n);
  ElementGeometry g_;
  std::array<std::array<Poly2, 12>, 3> pieces_;  // in xi = (x - center)/h
  double residual_ = 0;
};

// Global HCT space with homogeneous clamped boundary conditions.
class HctSpace {
 public:
  explicit HctSpace(const Mesh& m);
  int ndof() const { return ndof_; }
  // free global index of the 12 local DOFs of t, -1 for constrained ones
  std::array<int, 12> dofs(int t) const;
  // raw (unconstrained) global DOF numbering: 3v+{0,1,2} for vertices,
  // 3 nV + e for edges
  int raw_dof_count() const { return static_cast<int>(free_.size()); }
  int free_index(int raw) const { return free_[raw]; }
  const Mesh& mesh() const { return *m_; }

 private:
  const Mesh* m_;
  std::vector<int> free_;
  int ndof_ = 0;
};

// Coefficients of an HCT function on the free DOFs.
struct HCTField {
  Vector c;
};

// Local coefficient vector of `f` on t.
std::array<double, 12> hct_local(const HctSpace& s, const HCTField& f, int t);

}  // namespace obstacle
