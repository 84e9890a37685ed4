#include "obstacle/postproc.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "obstacle/parallel.hpp"
#include "obstacle/projection.hpp"
#include "obstacle/quadrature.hpp"

namespace obstacle {

// ---- weighted Clement ---------------------------------------------------------

namespace {

// Minimum-norm nonnegative solution of E a = d through the dual problem
//   max_y d.y - |max(0, E^T y)|^2 / 2,  a = max(0, E^T y),
// solved by a semismooth Newton method with backtracking.
Vector min_norm_nonneg(const Matrix& E, const Vector& d) {
  const int n = static_cast<int>(E.cols());
  Vector y = Vector::Zero(E.rows());
  y[0] = 1.0 / n;  // first row is the partition of unity: uniform start
  auto alpha = [&](const Vector& yy) { return (E.transpose() * yy).cwiseMax(0.0).eval(); };
  auto dual = [&](const Vector& yy) { return d.dot(yy) - 0.5 * alpha(yy).squaredNorm(); };
  for (int it = 0; it < 100; ++it) {
    const Vector a = alpha(y);
    const Vector grad = d - E * a;
    if (grad.norm() <= 1e-15 * (1 + d.norm())) return a;
    Matrix H = Matrix::Zero(E.rows(), E.rows());
    for (int j = 0; j < n; ++j)
      if (E.col(j).dot(y) > 0) H += E.col(j) * E.col(j).transpose();
    const Vector p = H.completeOrthogonalDecomposition().solve(grad);
    double s = 1;
    const double f0 = dual(y);
    while (s > 1e-12 && dual(y + s * p) < f0 + 1e-4 * s * grad.dot(p)) s *= 0.5;
    if (s <= 1e-12) break;
    y += s * p;
  }
  const Vector a = alpha(y);
  if ((E * a - d).norm() > 1e-12) throw InfeasiblePatch("no nonnegative Clement weights");
  return a;
}

}  // namespace

ClementWeights clement_weights(const Mesh& m) {
  const int nv = m.num_vertices();
  std::vector<Vector> per(nv);
  parallel_for(nv, [&](int v) {
    if (m.is_boundary_vertex(v)) return;
    const auto ts = m.vertex_triangles(v);
    const int n = static_cast<int>(ts.size());
    const Vec2 z = m.vertex(v);
    double hz = 0;
    for (int t : ts) hz = std::max(hz, m.diameter(t));
    Matrix E(3, n);
    for (int j = 0; j < n; ++j) {
      const Vec2 s = (m.centroid(ts[j]) - z) / hz;
      E(0, j) = 1;
      E(1, j) = s.x();
      E(2, j) = s.y();
    }
    per[v] = min_norm_nonneg(E, Vector::Unit(3, 0));
  });
  ClementWeights w;
  w.offsets.assign(1, 0);
  for (int v = 0; v < nv; ++v) {
    if (!m.is_boundary_vertex(v)) {
      const auto ts = m.vertex_triangles(v);
      for (size_t j = 0; j < ts.size(); ++j) {
        w.tris.push_back(ts[j]);
        w.alpha.push_back(per[v][j]);
      }
    }
    w.offsets.push_back(static_cast<int>(w.tris.size()));
  }
  return w;
}

P1cField clement_apply(const Mesh& m, const ClementWeights& w, const Vector& element_integrals) {
  P1cField out;
  out.c = Vector::Zero(m.num_vertices());
  out.h10 = true;
  for (int v = 0; v < m.num_vertices(); ++v)
    for (int k = w.offsets[v]; k < w.offsets[v + 1]; ++k)
      out.c[v] += w.alpha[k] / m.area(w.tris[k]) * element_integrals[w.tris[k]];
  return out;
}

P1cField clement_apply(const Mesh& m, const ClementWeights& w, const P0Field& v) {
  Vector I(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) I[t] = m.area(t) * v.c[t];
  return clement_apply(m, w, I);
}

// ---- local P3 recovery ----------------------------------------------------------

P3bField local_p3_recover(const Mesh& m, const XField& M, const P1dField& u) {
  const int nt = m.num_triangles();
  P3bField out;
  out.c = Vector::Zero(10 * nt);
  const TriQuad& q = tri_rule(6);
  std::vector<char> bad(nt, 0);
  parallel_for(nt, [&](int t) {
    const ElementGeometry g(m, t);
    Eigen::Matrix<double, 13, 13> K = Eigen::Matrix<double, 13, 13>::Zero();
    Eigen::Matrix<double, 13, 1> b = Eigen::Matrix<double, 13, 1>::Zero();
    const double s = std::pow(g.h, -4);  // balances the constraint rows
    for (int iq = 0; iq < q.size(); ++iq) {
      const Vec2 x = g.point(q.bary[iq]);
      const double w = g.area * q.w[iq];
      const P3Eval e = p3_basis(g, q.bary[iq]);
      const XEval n = x_field_eval(M, g, t, x);
      for (int i = 0; i < 10; ++i) {
        b[i] += w * frob(n.N, e.h[i]);
        for (int j = 0; j < 10; ++j) K(i, j) += w * frob(e.h[i], e.h[j]);
        for (int k = 0; k < 3; ++k) K(10 + k, i) += s * w * e.v[i] * q.bary[iq][k];
      }
    }
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 10; ++i) K(i, 10 + k) = K(10 + k, i);
      for (int j = 0; j < 3; ++j) b[10 + k] += s * p1_mass(g.area, k, j) * u.c[3 * t + j];
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 13, 13>> lu(K);
    if (lu.rank() < 13) {
      bad[t] = 1;
      return;
    }
    const Eigen::Matrix<double, 13, 1> x = lu.solve(b);
    for (int i = 0; i < 10; ++i) out.c[10 * t + i] = x[i];
  });
  for (int t = 0; t < nt; ++t)
    if (bad[t]) throw LocalSingularity("singular local recovery system on triangle " + std::to_string(t));
  return out;
}

Vector p3_moments(const Mesh& m, const P3bField& v) {
  const int nt = m.num_triangles();
  Vector out = Vector::Zero(3 * nt);
  const TriQuad& q = tri_rule(6);
  for (int t = 0; t < nt; ++t) {
    const double A = m.area(t);
    for (int iq = 0; iq < q.size(); ++iq) {
      const double val = p3_value(v, t, q.bary[iq]);
      for (int k = 0; k < 3; ++k) out[3 * t + k] += A * q.w[iq] * val * q.bary[iq][k];
    }
  }
  return out;
}

// ---- bubbles -------------------------------------------------------------------

namespace {

Jet2 mul(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}

double factorial(int n) {
  double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

Jet2 BubbleField::eval(const ElementGeometry& g, int t, const std::array<double, 3>& l) const {
  std::array<Jet2, 3> lam;
  for (int k = 0; k < 3; ++k) {
    lam[k].v = l[k];
    lam[k].g = g.grad_lambda[k];
  }
  const Jet2 eta = mul(mul(lam[0], lam[1]), lam[2]);
  const Jet2 eta2 = mul(eta, eta);
  Jet2 r;
  for (int z = 0; z < 3; ++z) {
    const double a = c[3 * t + z];
    if (a == 0.0) continue;
    const Jet2 f = mul(eta2, lam[z]);
    r.v += a * f.v;
    r.g += a * f.g;
    r.h += a * f.h;
  }
  return r;
}

Eigen::Matrix3d bubble_gram(double area) {
  Eigen::Matrix3d G;
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y) {
      int e[3] = {2, 2, 2};
      ++e[z];
      ++e[y];
      G(z, y) = 2 * area * factorial(e[0]) * factorial(e[1]) * factorial(e[2]) / factorial(10);
    }
  return G;
}

BubbleField b_h(const Mesh& m, const Vector& p1_moments) {
  const int nt = m.num_triangles();
  BubbleField out;
  out.c = Vector::Zero(3 * nt);
  const Eigen::Matrix3d Ginv = bubble_gram(1.0).inverse();
  for (int t = 0; t < nt; ++t)
    out.c.segment<3>(3 * t) = Ginv * p1_moments.segment<3>(3 * t) / m.area(t);
  return out;
}

BubbleField b_h(const Mesh& m, const P3bField& v) { return b_h(m, p3_moments(m, v)); }

BubbleField b_h(const Mesh& m, const P1dField& v) {
  Vector mom = Vector::Zero(3 * m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mom[3 * t + i] += p1_mass(m.area(t), i, j) * v.c[3 * t + j];
  return b_h(m, mom);
}

// ---- HCT smoothing --------------------------------------------------------------

HCTField e_h(const HctSpace& s, const P3bField& v) {
  const Mesh& m = s.mesh();
  const int nv = m.num_vertices(), ne = m.num_edges();
  HCTField out;
  out.c = Vector::Zero(s.ndof());
  for (int z = 0; z < nv; ++z) {
    if (s.free_index(3 * z) < 0) continue;
    double val = 0;
    Vec2 gr = Vec2::Zero();
    const auto ts = m.vertex_triangles(z);
    for (int t : ts) {
      const ElementGeometry g(m, t);
      std::array<double, 3> l{0, 0, 0};
      l[m.local_index(t, z)] = 1;
      const P3Eval e = p3_basis(g, l);
      for (int i = 0; i < 10; ++i) {
        val += v.c[10 * t + i] * e.v[i];
        gr += v.c[10 * t + i] * e.g[i];
      }
    }
    const double n = static_cast<double>(ts.size());
    out.c[s.free_index(3 * z)] = val / n;
    out.c[s.free_index(3 * z + 1)] = gr.x() / n;
    out.c[s.free_index(3 * z + 2)] = gr.y() / n;
  }
  for (int e = 0; e < ne; ++e) {
    const int d = s.free_index(3 * nv + e);
    if (d < 0) continue;
    const Vec2 nE = m.edge_normal(e);
    double acc = 0;
    int cnt = 0;
    for (int t : m.edge_triangles(e)) {
      if (t < 0) continue;
      const ElementGeometry g(m, t);
      const auto l = g.bary(m.edge_midpoint(e));
      const P3Eval ev = p3_basis(g, l);
      for (int i = 0; i < 10; ++i) acc += v.c[10 * t + i] * ev.g[i].dot(nE);
      ++cnt;
    }
    out.c[d] = acc / cnt;
  }
  return out;
}

Vector hct_moments(const HctSpace& s, const HCTField& f) {
  const Mesh& m = s.mesh();
  const int nt = m.num_triangles();
  Vector out = Vector::Zero(3 * nt);
  const TriQuad& q = tri_rule(6);
  parallel_for(nt, [&](int t) {
    const HctElement E(m, t);
    const auto c = hct_local(s, f, t);
    for (int sub = 0; sub < 3; ++sub) {
      const auto p = E.sub_corners(sub);
      const double A = m.area(t) / 3;
      for (int iq = 0; iq < q.size(); ++iq) {
        const Vec2 x = bary_point(p, q.bary[iq]);
        const auto ev = E.eval(sub, x);
        double val = 0;
        for (int a = 0; a < 12; ++a) val += c[a] * ev.v[a];
        const auto l = E.geometry().bary(x);
        for (int k = 0; k < 3; ++k) out[3 * t + k] += A * q.w[iq] * val * l[k];
      }
    }
  });
  return out;
}

Jet2 hct_eval(const HctSpace& s, const HCTField& f, int t, const Vec2& x) {
  const HctElement E(s.mesh(), t);
  const auto c = hct_local(s, f, t);
  const auto ev = E.eval(x);
  Jet2 r;
  for (int a = 0; a < 12; ++a) {
    r.v += c[a] * ev.v[a];
    r.g += c[a] * ev.g[a];
    r.h += c[a] * ev.h[a];
  }
  return r;
}

Jet2 SmoothedField::eval(const HctSpace& s, int t, const Vec2& x) const {
  Jet2 r = hct_eval(s, smooth, t, x);
  const ElementGeometry g(s.mesh(), t);
  const Jet2 b = bubble.eval(g, t, g.bary(x));
  r.v += b.v;
  r.g += b.g;
  r.h += b.h;
  return r;
}

SmoothedField j_h_hct(const HctSpace& s, const P3bField& v) {
  SmoothedField out;
  out.smooth = e_h(s, v);
  out.bubble = b_h(s.mesh(), Vector(p3_moments(s.mesh(), v) - hct_moments(s, out.smooth)));
  return out;
}

// ---- regularized maximum ----------------------------------------------------------

Jet2 m_eps(double w, const Vec2& grad, const Mat2& hess, double eps) {
  Jet2 r;
  if (w > eps) {
    r.v = w;
    r.g = grad;
    r.h = hess;
  } else if (w >= -eps) {
    const double d1 = w / (2 * eps) + 0.5;
    r.v = w * w / (4 * eps) + 0.5 * w + eps / 4;
    r.g = d1 * grad;
    r.h = grad * grad.transpose() / (2 * eps) + d1 * hess;
  }
  return r;
}

}  // namespace obstacle
