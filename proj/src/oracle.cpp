#include "obstacle/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <map>
#include <random>

#include "obstacle/hct.hpp"

// Deliberately self-contained: own Gauss rules, own P1 assembly, dense
// solves. Only mesh data and basis evaluators come from the library.

namespace obstacle {

namespace {

struct Rule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> w;  // sums to 1
};

// Golub-Welsch on [0, 1]
std::pair<Vector, Vector> gauss(int n) {
  Matrix J = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = k / std::sqrt(4.0 * k * k - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(J);
  Vector x(n), w(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (es.eigenvalues()[i] + 1);
    w[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);  // 2 v0^2 / 2
  }
  return {x, w};
}

// Duffy-collapsed tensor rule, exact to degree 2n-2 on a triangle
const Rule& rule(int n) {
  static std::map<int, Rule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const auto [x, w] = gauss(n);
  Rule r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double l1 = x[i], l2 = x[j] * (1 - x[i]);
      r.bary.push_back({1 - l1 - l2, l1, l2});
      r.w.push_back(2 * w[i] * w[j] * (1 - x[i]));
    }
  return cache.emplace(n, std::move(r)).first->second;
}

Vec2 at(const std::array<Vec2, 3>& p, const std::array<double, 3>& l) {
  return l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
}

double tri_area(const std::array<Vec2, 3>& p) {
  const Vec2 a = p[1] - p[0], b = p[2] - p[0];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

std::array<Vec2, 3> p1_grads(const std::array<Vec2, 3>& p) {
  const double A = tri_area(p);
  std::array<Vec2, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Vec2 d = p[(k + 2) % 3] - p[(k + 1) % 3];
    g[k] = Vec2(-d.y(), d.x()) / (2 * A);
  }
  return g;
}

// interior vertex numbering; -1 on the boundary
std::vector<int> interior_index(const Mesh& m, int* count) {
  std::vector<int> id(m.num_vertices(), -1);
  int n = 0;
  for (int v = 0; v < m.num_vertices(); ++v)
    if (!m.is_boundary_vertex(v)) id[v] = n++;
  *count = n;
  return id;
}

SparseMatrix p1_stiffness(const Mesh& m, const std::vector<int>& id, int n) {
  std::vector<Triplet> trip;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto p = m.corners(t);
    const auto g = p1_grads(p);
    const double A = tri_area(p);
    const auto& tr = m.triangle(t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (id[tr[a]] >= 0 && id[tr[b]] >= 0)
          trip.emplace_back(id[tr[a]], id[tr[b]], A * g[a].dot(g[b]));
  }
  SparseMatrix K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

}  // namespace

// ---- primal P1 obstacle -------------------------------------------------------

PrimalResult primal_p1_obstacle(const Mesh& m, const ScalarData& f, const ScalarData& g,
                                double tol, int max_sweeps) {
  int n = 0;
  const auto id = interior_index(m, &n);
  const SparseMatrix K = p1_stiffness(m, id, n);
  Vector b = Vector::Zero(n), lo(n);
  const Rule& q = rule(6);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto p = m.corners(t);
    const double A = tri_area(p);
    const auto& tr = m.triangle(t);
    for (size_t i = 0; i < q.w.size(); ++i) {
      const double fx = f(at(p, q.bary[i]));
      for (int a = 0; a < 3; ++a)
        if (id[tr[a]] >= 0) b[id[tr[a]]] += A * q.w[i] * fx * q.bary[i][a];
    }
  }
  for (int v = 0; v < m.num_vertices(); ++v)
    if (id[v] >= 0) lo[id[v]] = g(m.vertex(v));

  // row-major copy for the sweeps
  const Eigen::SparseMatrix<double, Eigen::RowMajor> R = K;
  Vector u = lo.cwiseMax(0.0);
  auto kkt = [&]() {
    const Vector r = K * u - b;
    double e = 0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(std::min(u[i] - lo[i], r[i])));
    return e;
  };
  PrimalResult out;
  for (int s = 1; s <= max_sweeps; ++s) {
    for (int i = 0; i < n; ++i) {
      double diag = 0, acc = b[i];
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(R, i); it; ++it) {
        if (it.col() == i)
          diag = it.value();
        else
          acc -= it.value() * u[it.col()];
      }
      u[i] = std::max(lo[i], acc / diag);
    }
    out.sweeps = s;
    if (s % 10 == 0 || s == max_sweeps) {
      out.kkt_residual = kkt();
      if (out.kkt_residual <= tol) break;
    }
  }
  if (out.kkt_residual > tol) throw NoConvergence("projected Gauss-Seidel did not converge");
  out.u.c = Vector::Zero(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v)
    if (id[v] >= 0) out.u.c[v] = u[id[v]];
  out.u.h10 = true;
  return out;
}

// ---- brute force --------------------------------------------------------------

BruteForceResult brute_force_active_set(const ComplementaritySystem& sys, double tol) {
  const int m = sys.num_pairs(), n = sys.dim();
  if (m > 16) throw Error("brute_force_active_set: more than 16 pairs");
  const Matrix K0 = Matrix(sys.K);
  BruteForceResult out;
  for (long mask = 0; mask < (1L << m); ++mask) {
    Matrix A = K0;
    Vector b = sys.rhs;
    std::vector<char> act(m);
    for (int i = 0; i < m; ++i) {
      const auto& pr = sys.pairs[i];
      act[i] = (mask >> i) & 1;
      A.row(pr.slot).setZero();
      if (act[i]) {
        for (const auto& [j, v] : pr.row) A(pr.slot, j) += v;
        b[pr.slot] = pr.offset;
      } else {
        A(pr.slot, pr.lambda) = 1;
        b[pr.slot] = 0;
      }
    }
    Eigen::PartialPivLU<Matrix> lu(A);
    const Vector x = lu.solve(b);
    if (!x.allFinite() || (A * x - b).norm() > 1e-8 * (1 + b.norm())) continue;  // singular
    double lam_max = 0, r_max = 0;
    Vector r(m);
    for (int i = 0; i < m; ++i) {
      const auto& pr = sys.pairs[i];
      double s = -pr.offset;
      for (const auto& [j, v] : pr.row) s += v * x[j];
      r[i] = s / pr.scale;
      lam_max = std::max(lam_max, std::abs(x[pr.lambda]));
      r_max = std::max(r_max, std::abs(r[i]));
    }
    bool ok = true;
    for (int i = 0; i < m && ok; ++i)
      ok = x[sys.pairs[i].lambda] >= -tol * (1 + lam_max) && r[i] >= -tol * (1 + r_max);
    if (!ok) continue;
    if (++out.feasible == 1) {
      out.x = x;
      out.active = act;
    }
  }
  if (out.feasible == 0) throw NoFeasibleSet("no feasible active set");
  if (out.feasible > 1) throw MultipleFeasibleSets("several feasible active sets (degenerate)");
  (void)n;
  return out;
}

// ---- dual norms ---------------------------------------------------------------

double discrete_dual_norm(const Mesh& coarse, const Density& mu, int order, int ref_levels) {
  if (order != 1 && order != 2) throw Error("discrete_dual_norm: order must be 1 or 2");
  Mesh fine = coarse;
  std::vector<std::vector<int>> chain;
  for (int l = 0; l < ref_levels; ++l) {
    fine = refine_uniform(fine);
    chain.push_back(fine.parents());
  }
  std::vector<int> anc = compose_parents(chain);
  if (anc.empty()) {
    anc.resize(coarse.num_triangles());
    for (int t = 0; t < coarse.num_triangles(); ++t) anc[t] = t;
  }
  const Rule& q = rule(5);

  if (order == 1) {
    int n = 0;
    const auto id = interior_index(fine, &n);
    const SparseMatrix K = p1_stiffness(fine, id, n);
    Vector b = Vector::Zero(n);
    for (int t = 0; t < fine.num_triangles(); ++t) {
      const auto p = fine.corners(t);
      const double A = tri_area(p);
      const auto& tr = fine.triangle(t);
      for (size_t i = 0; i < q.w.size(); ++i) {
        const double rho = mu(at(p, q.bary[i]), anc[t]);
        for (int a = 0; a < 3; ++a)
          if (id[tr[a]] >= 0) b[id[tr[a]]] += A * q.w[i] * rho * q.bary[i][a];
      }
    }
    if (b.norm() == 0.0) return 0.0;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
    const Vector w = ldlt.solve(b);
    return std::sqrt(std::max(0.0, b.dot(w)));
  }

  const HctSpace S(fine);
  const int n = S.ndof();
  std::vector<Triplet> trip;
  Vector b = Vector::Zero(n);
  const Rule& qs = rule(3);
  for (int t = 0; t < fine.num_triangles(); ++t) {
    const HctElement E(fine, t);
    const auto dofs = S.dofs(t);
    Eigen::Matrix<double, 12, 12> Ak = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 12, 1> bk = Eigen::Matrix<double, 12, 1>::Zero();
    for (int s = 0; s < 3; ++s) {
      const auto p = E.sub_corners(s);
      const double A = tri_area(p);
      for (size_t i = 0; i < qs.w.size(); ++i) {
        const auto ev = E.eval(s, at(p, qs.bary[i]));
        for (int a = 0; a < 12; ++a)
          for (int c = 0; c < 12; ++c) Ak(a, c) += A * qs.w[i] * frob(ev.h[a], ev.h[c]);
      }
      for (size_t i = 0; i < q.w.size(); ++i) {
        const Vec2 x = at(p, q.bary[i]);
        const auto ev = E.eval(s, x);
        const double rho = mu(x, anc[t]);
        for (int a = 0; a < 12; ++a) bk[a] += A * q.w[i] * rho * ev.v[a];
      }
    }
    for (int a = 0; a < 12; ++a) {
      if (dofs[a] < 0) continue;
      b[dofs[a]] += bk[a];
      for (int c = 0; c < 12; ++c)
        if (dofs[c] >= 0) trip.emplace_back(dofs[a], dofs[c], Ak(a, c));
    }
  }
  if (b.norm() == 0.0) return 0.0;
  SparseMatrix K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
  const Vector w = ldlt.solve(b);
  return std::sqrt(std::max(0.0, b.dot(w)));
}

// ---- distributional divDiv ------------------------------------------------------

namespace {

struct Jet {
  double v = 1;
  Vec2 g = Vec2::Zero();
  Mat2 h = Mat2::Zero();
  Jet operator*(const Jet& o) const {
    Jet r;
    r.v = v * o.v;
    r.g = v * o.g + o.v * g;
    r.h = v * o.h + o.v * h + g * o.g.transpose() + o.g * g.transpose();
    return r;
  }
};

// Smooth test function: prod_i l_i(x)^2 over the supporting lines of the
// boundary edges (vanishes with its gradient on the boundary) times a
// random cubic.
struct TestFunction {
  std::vector<std::pair<Vec2, double>> lines;  // a.x + c, |a| = 1/scale
  std::array<double, 10> q{};
  Jet operator()(const Vec2& x) const {
    Jet r;
    for (const auto& [a, c] : lines) {
      const double l = a.dot(x) + c;
      Jet f;
      f.v = l * l;
      f.g = 2 * l * a;
      f.h = 2 * a * a.transpose();
      r = r * f;
    }
    Jet p;
    p.v = 0;
    int k = 0;
    for (int d = 0; d <= 3; ++d)
      for (int i = d; i >= 0; --i, ++k) {
        const int j = d - i;
        const double xi = std::pow(x.x(), i), yj = std::pow(x.y(), j);
        p.v += q[k] * xi * yj;
        if (i > 0) p.g.x() += q[k] * i * std::pow(x.x(), i - 1) * yj;
        if (j > 0) p.g.y() += q[k] * j * xi * std::pow(x.y(), j - 1);
        if (i > 1) p.h(0, 0) += q[k] * i * (i - 1) * std::pow(x.x(), i - 2) * yj;
        if (j > 1) p.h(1, 1) += q[k] * j * (j - 1) * xi * std::pow(x.y(), j - 2);
        if (i > 0 && j > 0) {
          const double c = q[k] * i * j * std::pow(x.x(), i - 1) * std::pow(x.y(), j - 1);
          p.h(0, 1) += c;
          p.h(1, 0) += c;
        }
      }
    return r * p;
  }
};

std::vector<std::pair<Vec2, double>> boundary_lines(const Mesh& m) {
  double scale = 0;
  for (int t = 0; t < m.num_triangles(); ++t) scale = std::max(scale, m.diameter(t));
  Vec2 lo = m.vertex(0), hi = m.vertex(0);
  for (const Vec2& v : m.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double L = (hi - lo).norm();
  std::vector<std::pair<Vec2, double>> out;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.is_boundary_edge(e)) continue;
    const Vec2 n = m.edge_normal(e), p = m.vertex(m.edge(e)[0]);
    const double c = -n.dot(p);
    bool dup = false;
    for (const auto& [a, c2] : out) {
      // same line iff (a, c) agree up to a common sign
      const double s = (a * L).dot(n);
      if (std::abs(std::abs(s) - 1) < 1e-12 && std::abs(c2 * L - s * c) < 1e-12 * L) dup = true;
    }
    if (!dup) out.push_back({n / L, c / L});
  }
  (void)scale;
  return out;
}

}  // namespace

double divdiv_pairing_check(const Mesh& m, const XField& N, int trials, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  TestFunction phi;
  phi.lines = boundary_lines(m);
  const Rule& q = rule(10);
  // field samples are trial independent
  struct Sample {
    Vec2 x;
    double w;
    XEval N;
  };
  std::vector<Sample> samples;
  double nn = 0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const ElementGeometry g(m, t);
    for (size_t i = 0; i < q.w.size(); ++i) {
      const Vec2 x = at(g.p, q.bary[i]);
      samples.push_back({x, g.area * q.w[i], x_field_eval(N, g, t, x)});
      nn += samples.back().w * frob(samples.back().N.N, samples.back().N.N);
    }
  }
  double worst = 0;
  for (int k = 0; k < trials; ++k) {
    for (double& c : phi.q) c = U(rng);
    double a = 0, b = 0, hh = 0;
    for (const auto& s : samples) {
      const Jet j = phi(s.x);
      a += s.w * s.N.divdiv * j.v;
      b += s.w * frob(s.N.N, j.h);
      hh += s.w * frob(j.h, j.h);
    }
    const double scale = std::sqrt(nn * hh);
    if (scale > 0) worst = std::max(worst, std::abs(a - b) / scale);
  }
  return worst;
}

}  // namespace obstacle
