#include "obstacle/membrane.hpp"

#include <algorithm>
#include <cmath>

#include "obstacle/oracle.hpp"
#include "obstacle/parallel.hpp"
#include "obstacle/projection.hpp"
#include "obstacle/quadrature.hpp"

namespace obstacle {

void check_membrane_boundary(const MembraneProblem& p) {
  const Mesh& m = *p.mesh;
  double gmax = -1e300;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.is_boundary_edge(e)) continue;
    const Vec2 a = m.vertex(m.edge(e)[0]), b = m.vertex(m.edge(e)[1]);
    for (int k = 0; k <= 4; ++k) gmax = std::max(gmax, p.g.value(a + (k / 4.0) * (b - a)));
  }
  if (gmax > 1e-12) throw Error("obstacle violates g <= 0 on the boundary (max " + std::to_string(gmax) + ")");
}

namespace {

Eigen::Matrix3d local_rt0_mass(const Mesh& m, int t) {
  const ElementGeometry g(m, t);
  const TriQuad& q = tri_rule(2);
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  for (int i = 0; i < q.size(); ++i) {
    const Vec2 x = g.point(q.bary[i]);
    Vec2 psi[3];
    for (int k = 0; k < 3; ++k) psi[k] = rt0_basis(g, m.edge_sign(t, k), k, x);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) A(k, l) += q.w[i] * g.area * psi[k].dot(psi[l]);
  }
  return A;
}

}  // namespace

SparseMatrix rt0_mass(const Mesh& m) {
  const int nt = m.num_triangles();
  std::vector<Eigen::Matrix3d> loc(nt);
  parallel_for(nt, [&](int t) { loc[t] = local_rt0_mass(m, t); });
  std::vector<Triplet> tr;
  tr.reserve(9 * nt);
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) tr.emplace_back(m.tri_edge(t, k), m.tri_edge(t, l), loc[t](k, l));
  SparseMatrix A(m.num_edges(), m.num_edges());
  A.setFromTriplets(tr.begin(), tr.end());
  return A;
}

MembraneSystem assemble_membrane(const MembraneProblem& p) {
  check_membrane_boundary(p);
  const Mesh& m = *p.mesh;
  const int ne = m.num_edges(), nt = m.num_triangles();
  MembraneSystem out;
  SaddleSystem S;
  const int bs = S.add_block("sigma", ne);
  const int bu = S.add_block("u", nt);
  const int bl = S.add_block("lambda", nt);
  S.finalize();
  out.off_sigma = S.offset(bs);
  out.off_u = S.offset(bu);
  out.off_lambda = S.offset(bl);

  const SparseMatrix A = rt0_mass(m);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) S.add(bs, it.row(), bs, it.col(), it.value());
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const int e = m.tri_edge(t, k);
      const double b = m.edge_sign(t, k);  // int_T div psi_e
      S.add(bs, e, bu, t, b);
      S.add(bu, t, bs, e, b);
    }
    S.add(bu, t, bl, t, m.area(t));
  }
  out.int_f = element_integrals(p.f, m, p.quad_order);
  out.int_g = element_integrals(p.g, m, p.quad_order);
  out.sys.K = S.matrix();
  out.sys.rhs = Vector::Zero(S.dim());
  for (int t = 0; t < nt; ++t) out.sys.rhs[out.off_u + t] = -out.int_f[t];
  out.sys.pairs.resize(nt);
  for (int t = 0; t < nt; ++t) {
    auto& pr = out.sys.pairs[t];
    pr.lambda = out.off_lambda + t;
    pr.slot = out.off_lambda + t;
    pr.row = {{out.off_u + t, m.area(t)}};
    pr.offset = out.int_g[t];
    pr.scale = m.area(t);
    pr.triangle = t;
  }
  return out;
}

MembraneSolution solve_membrane(const MembraneProblem& p, const PdasConfig& cfg) {
  const MembraneSystem ms = assemble_membrane(p);
  const PdasResult r = solve_pdas(ms.sys, cfg);
  const Mesh& m = *p.mesh;
  MembraneSolution s;
  s.sigma.c = r.x.segment(ms.off_sigma, m.num_edges());
  s.u.c = r.x.segment(ms.off_u, m.num_triangles());
  s.lambda.c = r.x.segment(ms.off_lambda, m.num_triangles());
  s.active = r.active;
  s.iterations = r.iterations;
  return s;
}

MembraneProperties check_membrane_properties(const MembraneSolution& s, const MembraneProblem& p) {
  const Mesh& m = *p.mesh;
  const int nt = m.num_triangles();
  const Vector int_f = element_integrals(p.f, m, p.quad_order);
  const Vector int_g = element_integrals(p.g, m, p.quad_order);
  MembraneProperties r;
  double fs = 0;
  for (int t = 0; t < nt; ++t) fs = std::max(fs, std::abs(int_f[t] / m.area(t)));
  r.scale = std::max({1.0, fs, s.lambda.c.cwiseAbs().maxCoeff()});
  r.feasibility = 1e300;
  for (int t = 0; t < nt; ++t) {
    const double d = s.sigma.div(m, t) + s.lambda.c[t] + int_f[t] / m.area(t);
    r.divergence = std::max(r.divergence, std::abs(d));
    r.complementarity += s.lambda.c[t] * (m.area(t) * s.u.c[t] - int_g[t]);
    r.feasibility = std::min(r.feasibility, s.u.c[t] - int_g[t] / m.area(t));
  }
  r.complementarity = std::abs(r.complementarity);
  Vector res = rt0_mass(m) * s.sigma.c;
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) res[m.tri_edge(t, k)] += m.edge_sign(t, k) * s.u.c[t];
  r.orthogonality = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

MembraneErrors membrane_errors(const MembraneSolution& s, const MembraneProblem& p,
                               const ScalarData& u_exact, const ScalarData& lambda_exact,
                               int dual_ref_levels) {
  const Mesh& m = *p.mesh;
  const int nt = m.num_triangles();
  std::vector<std::array<double, 3>> loc(nt);
  parallel_for(nt, [&](int t) {
    const ElementGeometry g(m, t);
    const bool kink = u_exact.crosses_interface(g.p) || p.f.crosses_interface(g.p) ||
                      lambda_exact.crosses_interface(g.p);
    const TriQuad& q = tri_rule(kink ? 12 : 8);
    const double divh = s.sigma.div(m, t);
    double eu = 0, es = 0, ed = 0;
    for (int i = 0; i < q.size(); ++i) {
      const Vec2 x = g.point(q.bary[i]);
      const double w = q.w[i] * g.area;
      eu += w * std::pow(u_exact.value(x) - s.u.c[t], 2);
      es += w * (u_exact.grad(x) - s.sigma.value(m, g, t, x)).squaredNorm();
      const double divs = u_exact.hess(x).trace();
      ed += w * std::pow(divs - divh + lambda_exact.value(x) - s.lambda.c[t], 2);
    }
    loc[t] = {eu, es, ed};
  });
  MembraneErrors e;
  for (const auto& l : loc) {
    e.u += l[0];
    e.sigma += l[1];
    e.divergence += l[2];
  }
  e.u = std::sqrt(e.u);
  e.sigma = std::sqrt(e.sigma);
  e.divergence = std::sqrt(e.divergence);
  if (dual_ref_levels > 0) {
    // lambda - lambda_h as a functional through element integrals on the fine mesh
    const Vector lam = s.lambda.c;
    e.lambda_dual = discrete_dual_norm(
        m, [&](const Vec2& x, int coarse_t) { return lambda_exact.value(x) - lam[coarse_t]; }, 1,
        dual_ref_levels);
  }
  return e;
}

}  // namespace obstacle
