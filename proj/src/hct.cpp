#include "obstacle/hct.hpp"

#include <Eigen/QR>

namespace obstacle {

namespace {

// value and scaled gradient rows of the 10 cubic monomials at xi
void monomial_rows(const Vec2& xi, double* v, double* dx, double* dy) {
  for (int k = 0; k < 10; ++k) {
    const auto [i, j] = monomial_exponents(k);
    v[k] = std::pow(xi.x(), i) * std::pow(xi.y(), j);
    dx[k] = i == 0 ? 0.0 : i * std::pow(xi.x(), i - 1) * std::pow(xi.y(), j);
    dy[k] = j == 0 ? 0.0 : j * std::pow(xi.x(), i) * std::pow(xi.y(), j - 1);
  }
}

}  // namespace

HctElement::HctElement(const Mesh& m, int t) : g_(m, t) {
  std::array<Vec2, 3> n;
  for (int k = 0; k < 3; ++k) n[k] = m.edge_normal(m.tri_edge(t, k));
  build(n);
}

HctElement::HctElement(const std::array<Vec2, 3>& corners, const std::array<Vec2, 3>& edge_normals)
    : g_(corners) {
  build(edge_normals);
}

std::array<Vec2, 3> HctElement::sub_corners(int i) const {
  return {g_.center, g_.p[(i + 1) % 3], g_.p[(i + 2) % 3]};
}

int HctElement::locate(const Vec2& x) const {
  const auto l = g_.bary(x);
  int i = 0;
  for (int k = 1; k < 3; ++k)
    if (l[k] < l[i]) i = k;
  return i;
}

void HctElement::build(const std::array<Vec2, 3>& n) {
  const double h = g_.h;
  auto xi = [&](const Vec2& x) -> Vec2 { return (x - g_.center) / h; };
  std::vector<std::array<double, 31>> rows;  // 30 coefficients + dof id (-1: homogeneous)
  double v[10], dx[10], dy[10];
  auto add = [&](int sub, const double* r, double scale, int dof, int sub2 = -1) {
    std::array<double, 31> row{};
    for (int k = 0; k < 10; ++k) row[10 * sub + k] += scale * r[k];
    if (sub2 >= 0)
      for (int k = 0; k < 10; ++k) row[10 * sub2 + k] -= scale * r[k];
    row[30] = dof;
    rows.push_back(row);
  };
  // degrees of freedom; gradients in the scaled variable
  for (int k = 0; k < 3; ++k) {
    const int sub = (k + 1) % 3;
    monomial_rows(xi(g_.p[k]), v, dx, dy);
    add(sub, v, 1, 3 * k);
    add(sub, dx, 1, 3 * k + 1);
    add(sub, dy, 1, 3 * k + 2);
  }
  for (int k = 0; k < 3; ++k) {
    const Vec2 mid = 0.5 * (g_.p[(k + 1) % 3] + g_.p[(k + 2) % 3]);
    monomial_rows(xi(mid), v, dx, dy);
    double r[10];
    for (int j = 0; j < 10; ++j) r[j] = n[k].x() * dx[j] + n[k].y() * dy[j];
    add(k, r, 1, 9 + k);
  }
  // C1 across the three interior edges center -> p_{i+2}
  for (int i = 0; i < 3; ++i) {
    const int a = i, b = (i + 1) % 3;
    const Vec2 z = g_.p[(i + 2) % 3];
    for (int s = 0; s < 4; ++s) {
      const Vec2 p = g_.center + (s / 3.0) * (z - g_.center);
      monomial_rows(xi(p), v, dx, dy);
      add(a, v, 1, -1, b);
      if (s < 3) {
        const Vec2 q = g_.center + (s / 2.0) * (z - g_.center);
        monomial_rows(xi(q), v, dx, dy);
        add(a, dx, 1, -1, b);
        add(a, dy, 1, -1, b);
      }
    }
  }
  const int nr = static_cast<int>(rows.size());
  Matrix A(nr, 30);
  Matrix rhs = Matrix::Zero(nr, 12);
  for (int r = 0; r < nr; ++r) {
    for (int k = 0; k < 30; ++k) A(r, k) = rows[r][k];
    if (rows[r][30] >= 0) rhs(r, static_cast<int>(rows[r][30])) = 1;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  Matrix X = qr.solve(rhs);
  residual_ = (A * X - rhs).norm();
  // undo the gradient scaling: dof 3k+1, 3k+2, 9+k carry a factor h
  for (int d = 0; d < 12; ++d) {
    const double s = (d < 9 && d % 3 == 0) ? 1.0 : h;
    for (int sub = 0; sub < 3; ++sub) {
      Poly2 p;
      for (int k = 0; k < 10; ++k) {
        const auto [i, j] = monomial_exponents(k);
        p.c[i][j] = s * X(10 * sub + k, d);
      }
      pieces_[sub][d] = p;
    }
  }
}

HctElement::Eval HctElement::eval(int sub, const Vec2& x) const {
  const double h = g_.h;
  const Vec2 xi = (x - g_.center) / h;
  Eval e;
  for (int d = 0; d < 12; ++d) {
    const Poly2& p = pieces_[sub][d];
    const Poly2 px = p.dx(), py = p.dy();
    e.v[d] = p(xi);
    e.g[d] = Vec2(px(xi), py(xi)) / h;
    const double hxy = px.dy()(xi);
    e.h[d] << px.dx()(xi), hxy, hxy, py.dy()(xi);
    e.h[d] /= h * h;
  }
  return e;
}

HctSpace::HctSpace(const Mesh& m) : m_(&m) {
  const int nv = m.num_vertices(), ne = m.num_edges();
  free_.assign(3 * nv + ne, -1);
  for (int v = 0; v < nv; ++v)
    if (!m.is_boundary_vertex(v))
      for (int k = 0; k < 3; ++k) free_[3 * v + k] = ndof_++;
  for (int e = 0; e < ne; ++e)
    if (!m.is_boundary_edge(e)) free_[3 * nv + e] = ndof_++;
}

std::array<int, 12> HctSpace::dofs(int t) const {
  std::array<int, 12> d;
  const auto& tr = m_->triangle(t);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) d[3 * k + j] = free_[3 * tr[k] + j];
  for (int k = 0; k < 3; ++k) d[9 + k] = free_[3 * m_->num_vertices() + m_->tri_edge(t, k)];
  return d;
}

std::array<double, 12> hct_local(const HctSpace& s, const HCTField& f, int t) {
  std::array<double, 12> c{};
  const auto d = s.dofs(t);
  for (int k = 0; k < 12; ++k) c[k] = d[k] >= 0 ? f.c[d[k]] : 0.0;
  return c;
}

}  // namespace obstacle
