#pragma once

#include "obstacle/hct.hpp"
#include "obstacle/spaces.hpp"

namespace obstacle {

// ---- weighted Clement ---------------------------------------------------------

// Per interior vertex z, weights alpha_{z,T} over the patch with
// sum alpha = 1, sum alpha s_T = z, alpha >= 0 (minimum Euclidean norm).
struct ClementWeights {
  std::vector<int> offsets;  // CSR over vertices; boundary vertices are empty
  std::vector<int> tris;
  std::vector<double> alpha;
};

struct InfeasiblePatch : Error {
  using Error::Error;
};

ClementWeights clement_weights(const Mesh& m);
// Value at interior z: sum_T alpha_{z,T} / |T| * element_integrals[T].
P1cField clement_apply(const Mesh& m, const ClementWeights& w, const Vector& element_integrals);
P1cField clement_apply(const Mesh& m, const ClementWeights& w, const P0Field& v);

// ---- local P3 recovery ----------------------------------------------------------

struct LocalSingularity : Error {
  using Error::Error;
};

// Per element: <hess u*, hess v>_T = <M, hess v>_T for v in P3(T), and the P1
// moments of u* equal those of u.
P3bField local_p3_recover(const Mesh& m, const XField& M, const P1dField& u);

// Element P1 moments int_T v lambda_k (3 per triangle) of a P3 field.
Vector p3_moments(const Mesh& m, const P3bField& v);

// ---- bubbles -------------------------------------------------------------------

struct Jet2 {
  double v = 0;
  Vec2 g = Vec2::Zero();
  Mat2 h = Mat2::Zero();
};

// sum_z c_{T,z} eta_T^2 eta_z with eta_T = lambda_0 lambda_1 lambda_2
struct BubbleField {
  Vector c;  // 3 per triangle
  Jet2 eval(const ElementGeometry& g, int t, const std::array<double, 3>& l) const;
};

// Gram matrix <eta_T^2 eta_z, eta_z'>_T
Eigen::Matrix3d bubble_gram(double area);
// B_h from element P1 moments (3 per triangle).
BubbleField b_h(const Mesh& m, const Vector& p1_moments);
BubbleField b_h(const Mesh& m, const P3bField& v);
BubbleField b_h(const Mesh& m, const P1dField& v);

// ---- HCT smoothing --------------------------------------------------------------

HCTField e_h(const HctSpace& s, const P3bField& v);
Vector hct_moments(const HctSpace& s, const HCTField& f);
Jet2 hct_eval(const HctSpace& s, const HCTField& f, int t, const Vec2& x);

// J v = E v + B (1 - E) v
struct SmoothedField {
  HCTField smooth;
  BubbleField bubble;
  Jet2 eval(const HctSpace& s, int t, const Vec2& x) const;
};
SmoothedField j_h_hct(const HctSpace& s, const P3bField& v);

// ---- regularized maximum ----------------------------------------------------------

// M_eps{w, 0} with the chain rule; F'' = 1/(2 eps) on |w| <= eps.
Jet2 m_eps(double w, const Vec2& grad, const Mat2& hess, double eps);
inline double m_eps_value(double a, double b, double eps) {
  const double t = a - b;
  if (t >= eps) return a;
  if (t <= -eps) return b;
  return t * t / (4 * eps) + 0.5 * (a + b) + eps / 4;
}

}  // namespace obstacle
