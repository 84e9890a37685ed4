#include "obstacle/spaces.hpp"

#include <Eigen/Eigenvalues>

#include "obstacle/quadrature.hpp"

namespace obstacle {

ElementGeometry::ElementGeometry(const std::array<Vec2, 3>& corners) : p(corners) {
  const Vec2 e1 = p[1] - p[0], e2 = p[2] - p[0];
  area = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  h = std::max({(p[0] - p[1]).norm(), (p[1] - p[2]).norm(), (p[2] - p[0]).norm()});
  center = (p[0] + p[1] + p[2]) / 3.0;
  for (int k = 0; k < 3; ++k) {
    const Vec2 d = p[(k + 2) % 3] - p[(k + 1) % 3];
    grad_lambda[k] = Vec2(-d.y(), d.x()) / (2 * area);
  }
}

std::array<double, 3> ElementGeometry::bary(const Vec2& x) const {
  std::array<double, 3> l;
  for (int k = 0; k < 3; ++k) l[k] = grad_lambda[k].dot(x - p[(k + 1) % 3]);
  return l;
}

double P1dField::value(const Mesh&, int t, const std::array<double, 3>& l) const {
  return c[3 * t] * l[0] + c[3 * t + 1] * l[1] + c[3 * t + 2] * l[2];
}

Vec2 P1dField::grad(const ElementGeometry& g, int t) const {
  return c[3 * t] * g.grad_lambda[0] + c[3 * t + 1] * g.grad_lambda[1] +
         c[3 * t + 2] * g.grad_lambda[2];
}

double P1cField::value(const Mesh& m, int t, const std::array<double, 3>& l) const {
  const auto& tr = m.triangle(t);
  return c[tr[0]] * l[0] + c[tr[1]] * l[1] + c[tr[2]] * l[2];
}

Vec2 P1cField::grad(const Mesh& m, const ElementGeometry& g, int t) const {
  const auto& tr = m.triangle(t);
  return c[tr[0]] * g.grad_lambda[0] + c[tr[1]] * g.grad_lambda[1] + c[tr[2]] * g.grad_lambda[2];
}

Vec2 RT0Field::value(const Mesh& m, const ElementGeometry& g, int t, const Vec2& x) const {
  Vec2 v = Vec2::Zero();
  for (int k = 0; k < 3; ++k) v += c[m.tri_edge(t, k)] * rt0_basis(g, m.edge_sign(t, k), k, x);
  return v;
}

double RT0Field::div(const Mesh& m, int t) const {
  double s = 0;
  for (int k = 0; k < 3; ++k) s += c[m.tri_edge(t, k)] * m.edge_sign(t, k);
  return s / m.area(t);
}

Vec2 rt0_basis(const ElementGeometry& g, int sign, int k, const Vec2& x) {
  return sign / (2 * g.area) * (x - g.p[k]);
}

// ---- P3 ---------------------------------------------------------------------

const std::array<std::array<int, 3>, 10>& p3_nodes() {
  static const std::array<std::array<int, 3>, 10> n{{{3, 0, 0},
                                                     {0, 3, 0},
                                                     {0, 0, 3},
                                                     {2, 1, 0},
                                                     {1, 2, 0},
                                                     {0, 2, 1},
                                                     {0, 1, 2},
                                                     {1, 0, 2},
                                                     {2, 0, 1},
                                                     {1, 1, 1}}};
  return n;
}

namespace {

// prod_{m<n} (3t - m)/(m+1) with first and second derivative
std::array<double, 3> lattice_factor(int n, double t) {
  double f = 1, df = 0, d2f = 0;
  for (int m = 0; m < n; ++m) {
    const double a = (3 * t - m) / (m + 1), da = 3.0 / (m + 1);
    d2f = d2f * a + 2 * df * da;
    df = df * a + f * da;
    f *= a;
  }
  return {f, df, d2f};
}

}  // namespace

P3Eval p3_basis(const ElementGeometry& g, const std::array<double, 3>& l) {
  P3Eval out;
  const auto& nodes = p3_nodes();
  for (int i = 0; i < 10; ++i) {
    std::array<std::array<double, 3>, 3> f;
    for (int k = 0; k < 3; ++k) f[k] = lattice_factor(nodes[i][k], l[k]);
    out.v[i] = f[0][0] * f[1][0] * f[2][0];
    double d[3], dd[3][3];
    for (int k = 0; k < 3; ++k) {
      const int a = (k + 1) % 3, b = (k + 2) % 3;
      d[k] = f[k][1] * f[a][0] * f[b][0];
      dd[k][k] = f[k][2] * f[a][0] * f[b][0];
      dd[k][a] = dd[a][k] = f[k][1] * f[a][1] * f[b][0];
    }
    Vec2 gr = Vec2::Zero();
    Mat2 h = Mat2::Zero();
    for (int k = 0; k < 3; ++k) {
      gr += d[k] * g.grad_lambda[k];
      for (int j = 0; j < 3; ++j) h += dd[k][j] * g.grad_lambda[k] * g.grad_lambda[j].transpose();
    }
    out.g[i] = gr;
    out.h[i] = h;
  }
  return out;
}

double p3_value(const P3bField& f, int t, const std::array<double, 3>& l) {
  const auto& nodes = p3_nodes();
  double s = 0;
  for (int i = 0; i < 10; ++i) {
    double v = 1;
    for (int k = 0; k < 3; ++k) v *= lattice_factor(nodes[i][k], l[k])[0];
    s += f.c[10 * t + i] * v;
  }
  return s;
}

// ---- X(T) -------------------------------------------------------------------

XBasis::XBasis() {
  using P = Poly2;
  const P one = P::constant(1), zero, x = P::monomial(1, 0), y = P::monomial(0, 1);
  const std::vector<std::array<P, 2>> rt0{{one, zero}, {zero, one}, {x, y}};
  const std::vector<std::array<P, 2>> rt1{{one, zero}, {x, zero},  {y, zero},
                                          {zero, one}, {zero, x},  {zero, y},
                                          {x * x, x * y}, {x * y, y * y}};
  std::vector<std::array<P, 3>> prods;
  for (const auto& q : rt0)
    for (const auto& r : rt1)
      prods.push_back({q[0] * r[0], 0.5 * (q[0] * r[1] + q[1] * r[0]), q[1] * r[1]});

  // reference triangle in the scaled variable
  const Vec2 c(1.0 / 3, 1.0 / 3);
  const double h = std::sqrt(2.0);
  const std::array<Vec2, 3> ref{(Vec2(0, 0) - c) / h, (Vec2(1, 0) - c) / h, (Vec2(0, 1) - c) / h};
  const double area = 0.25;  // (1/2) / h^2
  const TriQuad& q = tri_rule(6);
  const int n = static_cast<int>(prods.size());
  Matrix G = Matrix::Zero(n, n);
  for (int iq = 0; iq < q.size(); ++iq) {
    const Vec2 p = bary_point(ref, q.bary[iq]);
    std::vector<std::array<double, 3>> v(n);
    for (int a = 0; a < n; ++a)
      for (int e = 0; e < 3; ++e) v[a][e] = prods[a][e](p);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        G(a, b) += q.w[iq] * area * (v[a][0] * v[b][0] + 2 * v[a][1] * v[b][1] + v[a][2] * v[b][2]);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  const Vector lam = es.eigenvalues();
  const double smax = std::sqrt(lam.maxCoeff());
  for (int k = n - 1; k >= 0; --k) {
    const double s = std::sqrt(std::max(lam[k], 0.0));
    spectrum_.push_back(s);
    if (s < 1e-6 * smax) continue;  // eigenvalue roundoff is ~1e-16, i.e. 1e-8 in s
    std::array<P, 3> b{};
    for (int a = 0; a < n; ++a)
      for (int e = 0; e < 3; ++e) b[e] += (es.eigenvectors()(a, k) / s) * prods[a][e];
    entries_.push_back(b);
  }
  for (const auto& b : entries_) {
    div_.push_back({b[0].dx() + b[1].dy(), b[1].dx() + b[2].dy()});
    divdiv_.push_back(div_.back()[0].dx() + div_.back()[1].dy());
    grad_.push_back({{{b[0].dx(), b[1].dx(), b[2].dx()}, {b[0].dy(), b[1].dy(), b[2].dy()}}});
  }
  if (dim() != kXDim) {
    std::string s;
    for (double v : spectrum_) s += " " + std::to_string(v);
    throw Error("unexpected dimension of sym(RT0 x RT1):" + s);
  }
}

const XBasis& XBasis::get() {
  static const XBasis b;
  return b;
}

XEval x_basis_eval(const ElementGeometry& g, int k, const Vec2& x) {
  const XBasis& B = XBasis::get();
  const Vec2 xi = (x - g.center) / g.h;
  const auto& e = B.entries(k);
  XEval r;
  const double n12 = e[1](xi);
  r.N << e[0](xi), n12, n12, e[2](xi);
  r.div = Vec2(B.div(k)[0](xi), B.div(k)[1](xi)) / g.h;
  r.divdiv = B.divdiv(k)(xi) / (g.h * g.h);
  return r;
}

std::array<std::array<double, 3>, 2> x_basis_grad(const ElementGeometry& g, int k, const Vec2& x) {
  const XBasis& B = XBasis::get();
  const Vec2 xi = (x - g.center) / g.h;
  std::array<std::array<double, 3>, 2> r;
  for (int d = 0; d < 2; ++d)
    for (int e = 0; e < 3; ++e) r[d][e] = B.grad(k)[d][e](xi) / g.h;
  return r;
}

XEval x_field_eval(const XField& f, const ElementGeometry& g, int t, const Vec2& x) {
  XEval r{Mat2::Zero(), Vec2::Zero(), 0.0};
  for (int k = 0; k < kXDim; ++k) {
    const double a = f.c[kXDim * t + k];
    if (a == 0.0) continue;
    const XEval b = x_basis_eval(g, k, x);
    r.N += a * b.N;
    r.div += a * b.div;
    r.divdiv += a * b.divdiv;
  }
  return r;
}

}  // namespace obstacle
