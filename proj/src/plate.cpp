#include "obstacle/plate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <cmath>

#include "obstacle/oracle.hpp"
#include "obstacle/parallel.hpp"
#include "obstacle/projection.hpp"
#include "obstacle/quadrature.hpp"

namespace obstacle {

void check_plate_boundary(const PlateProblem& p) {
  const Mesh& m = *p.mesh;
  double gmax = -1e300;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.is_boundary_edge(e)) continue;
    const Vec2 a = m.vertex(m.edge(e)[0]), b = m.vertex(m.edge(e)[1]);
    for (int k = 0; k <= 4; ++k) gmax = std::max(gmax, p.g.value(a + (k / 4.0) * (b - a)));
  }
  if (!(gmax < 0)) throw Error("obstacle violates g < 0 on the boundary (max " + std::to_string(gmax) + ")");
}

namespace {

double legendre01(int j, double s) {
  const double x = 2 * s - 1;
  switch (j) {
    case 0: return 1;
    case 1: return x;
    case 2: return 0.5 * (3 * x * x - 1);
    default: return 0.5 * (5 * x * x * x - 3 * x);
  }
}

// n.N.n and the effective shear of basis k of t along the line (n, t)
std::array<double, 2> edge_traces(const ElementGeometry& g, int k, const Vec2& x, const Vec2& n,
                                  const Vec2& tv) {
  const XEval e = x_basis_eval(g, k, x);
  const auto d = x_basis_grad(g, k, x);
  const double nn = n.dot(e.N * n);
  const double c11 = tv.x() * n.x(), c12 = tv.x() * n.y() + tv.y() * n.x(), c22 = tv.y() * n.y();
  double dt = 0;
  for (int dir = 0; dir < 2; ++dir)
    dt += (dir == 0 ? tv.x() : tv.y()) * (c11 * d[dir][0] + c12 * d[dir][1] + c22 * d[dir][2]);
  return {nn, n.dot(e.div) + dt};
}

}  // namespace

DivDivConstraints build_divdiv_constraints(const Mesh& m) {
  const int ne = m.num_edges();
  const LineQuad& lq = line_rule(8);
  // edge blocks, computed independently then appended in edge order
  std::vector<Matrix> edge_rows(ne);
  parallel_for(ne, [&](int e) {
    if (m.is_boundary_edge(e)) return;
    const auto tris = m.edge_triangles(e);
    const Vec2 a = m.vertex(m.edge(e)[0]), b = m.vertex(m.edge(e)[1]);
    const Vec2 tv = m.edge_tangent(e), n = m.edge_normal(e);
    const double hE = m.edge_length(e);
    Matrix blk = Matrix::Zero(8, 2 * kXDim);
    for (int side = 0; side < 2; ++side) {
      const ElementGeometry g(m, tris[side]);
      const double sgn = side == 0 ? 1.0 : -1.0;
      for (int q = 0; q < lq.size(); ++q) {
        const Vec2 x = a + lq.x[q] * (b - a);
        for (int k = 0; k < kXDim; ++k) {
          const auto tr = edge_traces(g, k, x, n, tv);
          for (int j = 0; j < 4; ++j) {
            const double w = sgn * lq.w[q] * legendre01(j, lq.x[q]);
            blk(j, side * kXDim + k) += w * tr[0];
            blk(4 + j, side * kXDim + k) += w * hE * tr[1];
          }
        }
      }
    }
    Eigen::JacobiSVD<Matrix> svd(blk, Eigen::ComputeThinU);
    const Vector& s = svd.singularValues();
    int r = 0;
    while (r < s.size() && s[r] > 1e-9 * s[0]) ++r;
    edge_rows[e] = svd.matrixU().leftCols(r).transpose() * blk;
  });
  std::vector<Triplet> trip;
  int row = 0;
  DivDivConstraints out;
  for (int e = 0; e < ne; ++e) {
    if (m.is_boundary_edge(e)) continue;
    const auto tris = m.edge_triangles(e);
    const Matrix& R = edge_rows[e];
    for (int i = 0; i < R.rows(); ++i, ++row)
      for (int side = 0; side < 2; ++side)
        for (int k = 0; k < kXDim; ++k)
          trip.emplace_back(row, kXDim * tris[side] + k, R(i, side * kXDim + k));
  }
  out.edge_rows = row;
  for (int z = 0; z < m.num_vertices(); ++z) {
    if (m.is_boundary_vertex(z)) continue;
    for (int t : m.vertex_triangles(z)) {
      const ElementGeometry g(m, t);
      const int l = m.local_index(t, z);
      const Vec2 pz = g.p[l], prev = g.p[(l + 2) % 3], next = g.p[(l + 1) % 3];
      const Vec2 tin = (pz - prev).normalized(), tout = (next - pz).normalized();
      const Vec2 nin(tin.y(), -tin.x()), nout(tout.y(), -tout.x());
      for (int k = 0; k < kXDim; ++k) {
        const Mat2 N = x_basis_eval(g, k, pz).N;
        trip.emplace_back(row, kXDim * t + k, tin.dot(N * nin) - tout.dot(N * nout));
      }
    }
    ++row;
  }
  out.vertex_rows = row - out.edge_rows;
  out.C.resize(row, kXDim * m.num_triangles());
  out.C.setFromTriplets(trip.begin(), trip.end());
  out.C.makeCompressed();
  return out;
}

PlateLocal plate_local(const Mesh& m, int t) {
  const ElementGeometry g(m, t);
  PlateLocal L;
  L.A.setZero();
  L.D.setZero();
  const TriQuad& q = tri_rule(6);
  for (int i = 0; i < q.size(); ++i) {
    const Vec2 x = g.point(q.bary[i]);
    const double w = q.w[i] * g.area;
    std::array<XEval, kXDim> e;
    for (int k = 0; k < kXDim; ++k) e[k] = x_basis_eval(g, k, x);
    for (int a = 0; a < kXDim; ++a) {
      for (int b = a; b < kXDim; ++b) L.A(a, b) += w * frob(e[a].N, e[b].N);
      for (int j = 0; j < 3; ++j) L.D(j, a) += w * e[a].divdiv * q.bary[i][j];
    }
  }
  L.A = L.A.selfadjointView<Eigen::Upper>();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) L.M(i, j) = p1_mass(g.area, i, j);
  return L;
}

namespace {

// rows of C touching triangle t and their local coefficients
struct LocalRows {
  std::vector<int> rows;
  Matrix P;  // rows x kXDim
};

std::vector<LocalRows> split_constraints(const SparseMatrix& C, int nt) {
  std::vector<LocalRows> out(nt);
  parallel_for(nt, [&](int t) {
    std::vector<std::pair<int, std::array<double, kXDim>>> acc;
    for (int k = 0; k < kXDim; ++k)
      for (SparseMatrix::InnerIterator it(C, kXDim * t + k); it; ++it) {
        auto pos = std::find_if(acc.begin(), acc.end(), [&](const auto& p) { return p.first == it.row(); });
        if (pos == acc.end()) {
          acc.push_back({static_cast<int>(it.row()), {}});
          pos = acc.end() - 1;
        }
        pos->second[k] = it.value();
      }
    std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    out[t].P.resize(acc.size(), kXDim);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      out[t].rows.push_back(acc[i].first);
      for (int k = 0; k < kXDim; ++k) out[t].P(i, k) = acc[i].second[k];
    }
  });
  return out;
}

}  // namespace

PlateSystem assemble_plate(const PlateProblem& p) {
  check_plate_boundary(p);
  const Mesh& m = *p.mesh;
  const int nt = m.num_triangles();
  PlateSystem ps;
  ps.cons = build_divdiv_constraints(m);
  const int nc = ps.cons.rows();
  ps.local.resize(nt);
  parallel_for(nt, [&](int t) { ps.local[t] = plate_local(m, t); });
  const auto lr = split_constraints(ps.cons.C, nt);
  ps.rhs_f = element_p1_moments(p.f, m, p.quad_order);
  ps.mom_g = element_p1_moments(p.g, m, p.quad_order);

  SaddleSystem S;
  const int bk = S.add_block("kappa", nc);
  const int bu = S.add_block("u", 3 * nt);
  const int bl = S.add_block("lambda", 3 * nt);
  S.finalize();
  ps.off_kappa = S.offset(bk);
  ps.off_u = S.offset(bu);
  ps.off_lambda = S.offset(bl);

  // Q = [P; -D] per element, contribution Q A^{-1} Q^T
  std::vector<Matrix> QWQ(nt);
  parallel_for(nt, [&](int t) {
    const auto& L = ps.local[t];
    const int r = static_cast<int>(lr[t].rows.size());
    Matrix Q(r + 3, kXDim);
    Q.topRows(r) = lr[t].P;
    Q.bottomRows(3) = -L.D;
    Eigen::LLT<Eigen::Matrix<double, kXDim, kXDim>> llt(L.A);
    const Matrix WQt = llt.solve(Q.transpose());
    QWQ[t] = Q * WQt;
  });
  std::size_t nnz = 0;
  for (const auto& q : QWQ) nnz += q.size();
  S.reserve(nnz + 9 * nt);
  for (int t = 0; t < nt; ++t) {
    const auto& rows = lr[t].rows;
    const int r = static_cast<int>(rows.size());
    auto gidx = [&](int i) { return i < r ? ps.off_kappa + rows[i] : ps.off_u + 3 * t + (i - r); };
    for (int i = 0; i < r + 3; ++i)
      for (int j = 0; j < r + 3; ++j) S.add_global(gidx(i), gidx(j), QWQ[t](i, j));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) S.add(bu, 3 * t + i, bl, 3 * t + j, -ps.local[t].M(i, j));
  }
  ps.sys.K = S.matrix();
  ps.sys.rhs = Vector::Zero(S.dim());
  ps.sys.rhs.segment(ps.off_u, 3 * nt) = ps.rhs_f;
  ps.sys.pairs.resize(3 * nt);
  for (int t = 0; t < nt; ++t)
    for (int i = 0; i < 3; ++i) {
      auto& pr = ps.sys.pairs[3 * t + i];
      pr.lambda = ps.off_lambda + 3 * t + i;
      pr.slot = pr.lambda;
      for (int j = 0; j < 3; ++j) pr.row.emplace_back(ps.off_u + 3 * t + j, ps.local[t].M(i, j));
      pr.offset = ps.mom_g[3 * t + i];
      pr.scale = m.area(t) / 3;
      pr.triangle = t;
      pr.local = i;
    }
  return ps;
}

XField recover_moments(const PlateSystem& ps, const Mesh& m, const Vector& kappa, const Vector& u) {
  const int nt = m.num_triangles();
  XField M;
  M.c.resize(kXDim * nt);
  const Vector ctk = ps.cons.C.transpose() * kappa;
  parallel_for(nt, [&](int t) {
    const auto& L = ps.local[t];
    const Eigen::Matrix<double, kXDim, 1> rhs =
        L.D.transpose() * u.segment<3>(3 * t) - ctk.segment<kXDim>(kXDim * t);
    M.c.segment<kXDim>(kXDim * t) = Eigen::LLT<Eigen::Matrix<double, kXDim, kXDim>>(L.A).solve(rhs);
  });
  M.constraint_residual = ps.cons.rows() ? (ps.cons.C * M.c).cwiseAbs().maxCoeff() : 0.0;
  return M;
}

PlateSolution solve_plate(const PlateProblem& p, const PdasConfig& cfg) {
  const PlateSystem ps = assemble_plate(p);
  return solve_plate(p, ps, cfg);
}

PlateSolution solve_plate(const PlateProblem& p, const PlateSystem& ps, const PdasConfig& cfg) {
  const Mesh& m = *p.mesh;
  const int nt = m.num_triangles();
  const PdasResult r = solve_pdas(ps.sys, cfg);
  PlateSolution s;
  s.kappa = r.x.segment(ps.off_kappa, ps.cons.rows());
  s.u.c = r.x.segment(ps.off_u, 3 * nt);
  s.lambda.c = r.x.segment(ps.off_lambda, 3 * nt);
  s.M = recover_moments(ps, m, s.kappa, s.u.c);
  s.active = r.active;
  s.iterations = r.iterations;
  return s;
}

long plate_dofs(const Mesh& m, const DivDivConstraints& c) {
  return static_cast<long>(kXDim + 6) * m.num_triangles() - c.rows();
}

PlateProperties check_plate_properties(const PlateSolution& s, const PlateProblem& p) {
  const Mesh& m = *p.mesh;
  const int nt = m.num_triangles();
  PlateProperties r;
  const P1dField pf = project_p1d(p.f, m, p.quad_order);
  const Vector mom_g = element_p1_moments(p.g, m, p.quad_order);
  const DivDivConstraints cons = build_divdiv_constraints(m);
  Vector res(kXDim * nt);
  double e2 = 0, fscale = 0;
  r.min_lambda = s.lambda.c.size() ? s.lambda.c.minCoeff() : 0.0;
  r.min_residual = 1e300;
  for (int t = 0; t < nt; ++t) {
    const PlateLocal L = plate_local(m, t);
    const ElementGeometry g(m, t);
    const Eigen::Matrix<double, kXDim, 1> mt = s.M.c.segment<kXDim>(kXDim * t);
    res.segment<kXDim>(kXDim * t) = L.A * mt - L.D.transpose() * s.u.c.segment<3>(3 * t);
    // divDiv M_h is affine on t: compare nodal values
    Eigen::Vector3d d;
    for (int i = 0; i < 3; ++i) {
      double dd = 0;
      for (int k = 0; k < kXDim; ++k) dd += mt[k] * x_basis_eval(g, k, g.p[i]).divdiv;
      d[i] = dd - s.lambda.c[3 * t + i] - pf.c[3 * t + i];
      fscale = std::max({fscale, std::abs(pf.c[3 * t + i]), std::abs(s.lambda.c[3 * t + i])});
    }
    e2 += d.dot(L.M * d);
    const Eigen::Vector3d ut = s.u.c.segment<3>(3 * t);
    const Eigen::Vector3d rt = L.M * ut - mom_g.segment<3>(3 * t);
    r.complementarity += s.lambda.c.segment<3>(3 * t).dot(rt);
    for (int i = 0; i < 3; ++i) r.min_residual = std::min(r.min_residual, rt[i] / (g.area / 3));
  }
  r.divdiv = std::sqrt(std::max(e2, 0.0));
  r.complementarity = std::abs(r.complementarity);
  r.scale = std::max(1.0, fscale);
  // project the first-equation residual onto the kernel of C
  if (cons.rows() > 0) {
    const SparseMatrix CCt = cons.C * cons.C.transpose();
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(CCt);
    const Vector y = ldlt.solve(cons.C * res);
    res -= cons.C.transpose() * y;
    r.constraint = (cons.C * s.M.c).cwiseAbs().maxCoeff();
  }
  r.orthogonality = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

PlateErrors plate_errors(const PlateSolution& s, const PlateProblem& p, const ScalarData& u_exact,
                         const ScalarData* lambda_exact, int dual_ref_levels) {
  const Mesh& m = *p.mesh;
  const int nt = m.num_triangles();
  std::vector<std::array<double, 2>> loc(nt);
  parallel_for(nt, [&](int t) {
    const ElementGeometry g(m, t);
    const TriQuad& q = tri_rule(u_exact.crosses_interface(g.p) ? 12 : 8);
    double eu = 0, eM = 0;
    for (int i = 0; i < q.size(); ++i) {
      const Vec2 x = g.point(q.bary[i]);
      const double w = q.w[i] * g.area;
      eu += w * std::pow(u_exact.value(x) - s.u.value(m, t, q.bary[i]), 2);
      const Mat2 d = u_exact.hess(x) - x_field_eval(s.M, g, t, x).N;
      eM += w * frob(d, d);
    }
    loc[t] = {eu, eM};
  });
  PlateErrors e;
  for (const auto& l : loc) {
    e.u += l[0];
    e.M += l[1];
  }
  e.u = std::sqrt(e.u);
  e.M = std::sqrt(e.M);
  if (lambda_exact && dual_ref_levels > 0) {
    const P1dField lam = s.lambda;
    const Mesh& mm = m;
    e.lambda_dual = discrete_dual_norm(
        m,
        [&](const Vec2& x, int ct) {
          const ElementGeometry g(mm, ct);
          return lambda_exact->value(x) - lam.value(mm, ct, g.bary(x));
        },
        2, dual_ref_levels);
  }
  return e;
}

}  // namespace obstacle
