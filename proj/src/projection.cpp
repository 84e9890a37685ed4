#include "obstacle/projection.hpp"

#include <Eigen/Dense>
#include <random>

#include "obstacle/quadrature.hpp"

namespace obstacle {

bool ScalarData::crosses_interface(const std::array<Vec2, 3>& tri) const {
  for (const Vec2& z : singular_points) {
    const ElementGeometry g(tri);
    const auto l = g.bary(z);
    if (std::min({l[0], l[1], l[2]}) >= -1e-12) return true;
  }
  // sample the order-4 lattice and look for a sign change
  for (const auto& phi : interfaces) {
    double lo = 1e300, hi = -1e300;
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; a + b <= 4; ++b) {
        const double l1 = a / 4.0, l2 = b / 4.0;
        const double v = phi((1 - l1 - l2) * tri[0] + l1 * tri[1] + l2 * tri[2]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (lo <= 0 && hi >= 0) return true;
  }
  return false;
}

ScalarData ScalarData::constant(double c) {
  ScalarData d;
  d.value = [c](const Vec2&) { return c; };
  d.grad = [](const Vec2&) { return Vec2::Zero().eval(); };
  d.hess = [](const Vec2&) { return Mat2::Zero().eval(); };
  return d;
}

ScalarData ScalarData::affine(double a, const Vec2& b) {
  ScalarData d;
  d.value = [a, b](const Vec2& p) { return a + b.dot(p); };
  d.grad = [b](const Vec2&) { return b; };
  d.hess = [](const Vec2&) { return Mat2::Zero().eval(); };
  return d;
}

ScalarData ScalarData::scaled(double s) const {
  ScalarData d = *this;
  auto v = value;
  auto g = grad;
  auto h = hess;
  d.value = [v, s](const Vec2& p) { return s * v(p); };
  if (g) d.grad = [g, s](const Vec2& p) { return (s * g(p)).eval(); };
  if (h) d.hess = [h, s](const Vec2& p) { return (s * h(p)).eval(); };
  return d;
}

double check_derivatives(const ScalarData& f, const Vec2& lo, const Vec2& hi, int n,
                         unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  const double eps = 1e-5 * (hi - lo).norm();
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2 p(lo.x() + U(rng) * (hi.x() - lo.x()), lo.y() + U(rng) * (hi.y() - lo.y()));
    // skip points too close to a declared kink
    bool near = false;
    for (const auto& phi : f.interfaces) near |= std::abs(phi(p)) < 1e-3;
    if (near) continue;
    const Vec2 ex(eps, 0), ey(0, eps);
    const Vec2 g = f.grad(p);
    const Vec2 gfd((f.value(p + ex) - f.value(p - ex)) / (2 * eps),
                   (f.value(p + ey) - f.value(p - ey)) / (2 * eps));
    const Mat2 H = f.hess(p);
    Mat2 Hfd;
    Hfd.col(0) = (f.grad(p + ex) - f.grad(p - ex)) / (2 * eps);
    Hfd.col(1) = (f.grad(p + ey) - f.grad(p - ey)) / (2 * eps);
    const double sg = std::max(1.0, g.norm()), sh = std::max(1.0, H.norm());
    worst = std::max({worst, (g - gfd).norm() / sg, (H - Hfd).norm() / sh});
  }
  return worst;
}

int element_order(const ScalarData& f, const std::array<Vec2, 3>& c, int quad_order) {
  if (quad_order > 0) return quad_order;
  return data_order(f.crosses_interface(c));
}

Vector element_integrals(const ScalarData& f, const Mesh& m, int quad_order) {
  Vector out(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto c = m.corners(t);
    const TriQuad& q = tri_rule(element_order(f, c, quad_order));
    double s = 0;
    for (int i = 0; i < q.size(); ++i) s += q.w[i] * f.value(bary_point(c, q.bary[i]));
    out[t] = s * m.area(t);
  }
  return out;
}

Vector element_p1_moments(const ScalarData& f, const Mesh& m, int quad_order) {
  Vector out(3 * m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto c = m.corners(t);
    const TriQuad& q = tri_rule(element_order(f, c, quad_order));
    double s[3] = {0, 0, 0};
    for (int i = 0; i < q.size(); ++i) {
      const double v = q.w[i] * f.value(bary_point(c, q.bary[i]));
      for (int k = 0; k < 3; ++k) s[k] += v * q.bary[i][k];
    }
    for (int k = 0; k < 3; ++k) out[3 * t + k] = s[k] * m.area(t);
  }
  return out;
}

P0Field project_p0(const ScalarData& f, const Mesh& m, int quad_order) {
  Vector v = element_integrals(f, m, quad_order);
  for (int t = 0; t < m.num_triangles(); ++t) v[t] /= m.area(t);
  return {v};
}

P1dField project_p1d(const ScalarData& f, const Mesh& m, int quad_order) {
  const Vector mom = element_p1_moments(f, m, quad_order);
  // inverse of the barycentric mass (|T|/12)(I + 11^T) is (3/|T|)(4I - 11^T)
  Vector c(3 * m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double s = mom[3 * t] + mom[3 * t + 1] + mom[3 * t + 2];
    for (int k = 0; k < 3; ++k) c[3 * t + k] = 3.0 / m.area(t) * (4 * mom[3 * t + k] - s);
  }
  return {c};
}

RT0Field interpolate_rt0(const VectorFn& q, const Mesh& m, int line_order) {
  const LineQuad& g = line_rule(line_order);
  Vector c(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    const Vec2 a = m.vertex(m.edge(e)[0]), b = m.vertex(m.edge(e)[1]);
    const Vec2 n = m.edge_normal(e);
    double s = 0;
    for (int i = 0; i < g.size(); ++i) s += g.w[i] * q(a + g.x[i] * (b - a)).dot(n);
    c[e] = s * m.edge_length(e);
  }
  return {c};
}

P1cField interpolate_p1c(const ScalarData& f, const Mesh& m) {
  P1cField out;
  out.h10 = false;
  out.c.resize(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) out.c[v] = f.value(m.vertex(v));
  return out;
}

}  // namespace obstacle
