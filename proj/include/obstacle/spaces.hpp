#pragma once

#include "obstacle/mesh.hpp"
#include "obstacle/poly.hpp"

namespace obstacle {

// ---- element geometry -------------------------------------------------------

struct ElementGeometry {
  std::array<Vec2, 3> p;
  double area = 0;
  double h = 0;               // diameter
  Vec2 center;                // centroid
  std::array<Vec2, 3> grad_lambda;

  explicit ElementGeometry(const std::array<Vec2, 3>& corners);
  ElementGeometry(const Mesh& m, int t) : ElementGeometry(m.corners(t)) {}
  std::array<double, 3> bary(const Vec2& x) const;
  Vec2 point(const std::array<double, 3>& l) const { return l[0] * p[0] + l[1] * p[1] + l[2] * p[2]; }
};

// ---- coefficient fields -----------------------------------------------------
// Ordering: triangle-major for broken spaces, vertex-major for P1c,
// edge-major for RT0.

struct P0Field {
  Vector c;
};

struct P1dField {  // nodal values at the three local vertices
  Vector c;
  double value(const Mesh& m, int t, const std::array<double, 3>& l) const;
  Vec2 grad(const ElementGeometry& g, int t) const;
};

struct P1cField {
  Vector c;
  bool h10 = true;
  double value(const Mesh& m, int t, const std::array<double, 3>& l) const;
  Vec2 grad(const Mesh& m, const ElementGeometry& g, int t) const;
};

struct P3bField {  // Lagrange values at the P3 principal lattice
  Vector c;
  static constexpr int ndof = 10;
};

struct RT0Field {  // normal flux through each edge along the global normal
  Vector c;
  Vec2 value(const Mesh& m, const ElementGeometry& g, int t, const Vec2& x) const;
  double div(const Mesh& m, int t) const;
};

struct XField {
  Vector c;
  double constraint_residual = 0;
};

// ---- P1 / P3 Lagrange -------------------------------------------------------

// Multi-indices (times 3) of the P3 lattice nodes: vertices, edge nodes, center.
const std::array<std::array<int, 3>, 10>& p3_nodes();

struct P3Eval {
  std::array<double, 10> v;
  std::array<Vec2, 10> g;
  std::array<Mat2, 10> h;
};
P3Eval p3_basis(const ElementGeometry& g, const std::array<double, 3>& l);
double p3_value(const P3bField& f, int t, const std::array<double, 3>& l);

// ---- RT0 --------------------------------------------------------------------

// Local basis for local edge k with unit flux along the global edge normal.
Vec2 rt0_basis(const ElementGeometry& g, int sign, int k, const Vec2& x);
inline double rt0_div(const ElementGeometry& g, int sign) { return sign / g.area; }

// ---- sym(RT0 (x) RT1) -------------------------------------------------------

// Fixed basis in the scaled variable xi = (x - center)/h; orthonormal on the
// reference triangle mapped to that variable. Entries (N11, N12, N22).
class XBasis {
 public:
  static const XBasis& get();
  int dim() const { return static_cast<int>(entries_.size()); }
  const std::array<Poly2, 3>& entries(int k) const { return entries_[k]; }
  const std::array<Poly2, 2>& div(int k) const { return div_[k]; }
  const Poly2& divdiv(int k) const { return divdiv_[k]; }
  // d/dxi and d/deta of each entry
  const std::array<std::array<Poly2, 3>, 2>& grad(int k) const { return grad_[k]; }
  // singular values of the product family (for reporting the rank cut)
  const std::vector<double>& spectrum() const { return spectrum_; }

 private:
  XBasis();
  std::vector<std::array<Poly2, 3>> entries_;
  std::vector<std::array<Poly2, 2>> div_;
  std::vector<Poly2> divdiv_;
  std::vector<std::array<std::array<Poly2, 3>, 2>> grad_;
  std::vector<double> spectrum_;
};

inline constexpr int kXDim = 15;

struct XEval {
  Mat2 N;
  Vec2 div;
  double divdiv;
};
XEval x_basis_eval(const ElementGeometry& g, int k, const Vec2& x);
// d/dx and d/dy of the entries (N11, N12, N22)
std::array<std::array<double, 3>, 2> x_basis_grad(const ElementGeometry& g, int k, const Vec2& x);
XEval x_field_eval(const XField& f, const ElementGeometry& g, int t, const Vec2& x);

inline double frob(const Mat2& a, const Mat2& b) { return (a.array() * b.array()).sum(); }

}  // namespace obstacle
