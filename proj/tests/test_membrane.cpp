#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "battery.hpp"
#include "obstacle/examples.hpp"
#include "obstacle/projection.hpp"
#include "obstacle/quadrature.hpp"

using namespace obstacle;

namespace {

void expect_properties(const MembraneSolution& s, const MembraneProblem& p) {
  const MembraneProperties r = check_membrane_properties(s, p);
  EXPECT_LE(r.divergence, 1e-9 * r.scale);
  EXPECT_LE(r.orthogonality, 1e-9);
  EXPECT_LE(r.complementarity, 1e-9 * r.scale);
  EXPECT_GE(r.feasibility, -1e-10);
}

}  // namespace

TEST(Membrane, InactiveTwoTriangles) {
  const Mesh m = make_domain(Domain::unit_square, 0);
  const MembraneProblem p{&m, ScalarData::constant(1), ScalarData::constant(-1)};
  const MembraneSystem ms = assemble_membrane(p);
  EXPECT_EQ(ms.sys.num_pairs(), 2);
  EXPECT_EQ(ms.sys.dim(), m.num_edges() + 2 * m.num_triangles());
  const MembraneSolution s = solve_membrane(p, {});
  EXPECT_EQ(s.lambda.c.norm(), 0.0);

  // mixed Poisson: drop the multipliers
  const std::vector<char> none(2, 0);
  const Vector x = Matrix(ms.sys.matrix_for(none)).fullPivLu().solve(ms.sys.rhs_for(none));
  for (int t = 0; t < 2; ++t) EXPECT_NEAR(s.u.c[t], x[ms.off_u + t], 1e-12);
  for (int e = 0; e < m.num_edges(); ++e) EXPECT_NEAR(s.sigma.c[e], x[ms.off_sigma + e], 1e-12);
  expect_properties(s, p);
}

TEST(Membrane, ZeroLoadGivesZeroSolution) {
  const Mesh m = make_domain(Domain::lshape_paper, 2);
  const MembraneProblem p{&m, ScalarData::constant(0), testing_support::paraboloid(-0.1, 1, Vec2(0.3, 0.3))};
  const MembraneSolution s = solve_membrane(p, {});
  EXPECT_LT(s.u.c.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(s.sigma.c.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(s.lambda.c.cwiseAbs().maxCoeff(), 1e-14);
  const MembraneProperties r = check_membrane_properties(s, p);
  EXPECT_LT(r.divergence, 1e-14);
  EXPECT_LT(r.orthogonality, 1e-14);
  EXPECT_LT(r.complementarity, 1e-14);
}

TEST(Membrane, BoundaryCompatibility) {
  const Mesh m = make_domain(Domain::unit_square, 1);
  EXPECT_THROW(assemble_membrane({&m, ScalarData::constant(1), ScalarData::constant(0.5)}), Error);
  EXPECT_NO_THROW(assemble_membrane({&m, ScalarData::constant(1), ScalarData::constant(0.0)}));
}

TEST(Membrane, PropertiesOnExamples) {
  for (const Example& ex : {membrane_smooth_example(), membrane_pyramid_example()}) {
    Mesh m = make_domain(ex.domain, 1);
    for (int level = 0; level < 3; ++level) {
      SCOPED_TRACE(ex.id + " level " + std::to_string(level));
      const MembraneProblem p{&m, ex.f, ex.g};
      const MembraneSolution s = solve_membrane(p, {});
      expect_properties(s, p);
      for (double l : s.lambda.c) EXPECT_GE(l, -1e-10);
      m = refine_uniform(m);
    }
  }
}

TEST(Membrane, CheckerDetectsPerturbation) {
  const Example ex = membrane_smooth_example();
  const Mesh m = make_domain(ex.domain, 2);
  const MembraneProblem p{&m, ex.f, ex.g};
  MembraneSolution s = solve_membrane(p, {});
  s.lambda.c[3] += 1;
  EXPECT_NEAR(check_membrane_properties(s, p).divergence, 1.0, 1e-9);
}

TEST(Membrane, ScalingCovariance) {
  const Example ex = membrane_pyramid_example();
  const Mesh m = make_domain(ex.domain, 2);
  const MembraneSolution a = solve_membrane({&m, ex.f, ex.g}, {});
  const double s = 3.5;
  const MembraneSolution b = solve_membrane({&m, ex.f.scaled(s), ex.g.scaled(s)}, {});
  EXPECT_EQ(a.active, b.active);
  auto close = [&](const Vector& x, const Vector& y) {
    EXPECT_LE((s * x - y).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, y.cwiseAbs().maxCoeff()));
  };
  close(a.u.c, b.u.c);
  close(a.sigma.c, b.sigma.c);
  close(a.lambda.c, b.lambda.c);
}

TEST(Membrane, DivergenceResidualIsDataOscillation) {
  // div(sigma - sigma_h) + lambda - lambda_h = Pi0 f - f
  const Example ex = membrane_smooth_example();
  const Mesh m = make_domain(ex.domain, 3);
  const MembraneProblem p{&m, ex.f, ex.g};
  const MembraneSolution s = solve_membrane(p, {});
  const P0Field pf = project_p0(ex.f, m);
  double lhs = 0, rhs = 0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const ElementGeometry g(m, t);
    const TriQuad& q = tri_rule(12);
    for (int i = 0; i < q.size(); ++i) {
      const double fx = ex.f.value(g.point(q.bary[i]));
      lhs += q.w[i] * g.area * std::pow(s.sigma.div(m, t) + s.lambda.c[t] + fx, 2);
      rhs += q.w[i] * g.area * std::pow(fx - pf.c[t], 2);
    }
  }
  EXPECT_NEAR(std::sqrt(lhs), std::sqrt(rhs), 1e-10 * std::max(1.0, std::sqrt(rhs)));
}

TEST(Membrane, ErrorsOfProjections) {
  // with u_h = Pi0 u and sigma_h = Pi^div grad u the reported errors are the
  // projection errors
  const Example ex = membrane_smooth_example();
  const Mesh m = make_domain(ex.domain, 2);
  const MembraneProblem p{&m, ex.f, ex.g};
  MembraneSolution s;
  s.u = project_p0(*ex.u_exact, m);
  s.sigma = interpolate_rt0(ex.u_exact->grad, m);
  s.lambda = project_p0(*ex.lambda_exact, m);
  const MembraneErrors e = membrane_errors(s, p, *ex.u_exact, *ex.lambda_exact);
  double eu = 0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const ElementGeometry g(m, t);
    const TriQuad& q = tri_rule(18);
    for (int i = 0; i < q.size(); ++i)
      eu += q.w[i] * g.area * std::pow(ex.u_exact->value(g.point(q.bary[i])) - s.u.c[t], 2);
  }
  EXPECT_NEAR(e.u, std::sqrt(eu), 1e-12);
  EXPECT_GT(e.sigma, 0);

  MembraneSolution z;
  z.u = P0Field{Vector::Zero(m.num_triangles())};
  z.lambda = z.u;
  z.sigma = RT0Field{Vector::Zero(m.num_edges())};
  const MembraneErrors ez = membrane_errors(z, {&m, ScalarData::constant(0), ScalarData::constant(-1)},
                                            ScalarData::constant(0), ScalarData::constant(0), 1);
  EXPECT_EQ(ez.u, 0.0);
  EXPECT_EQ(ez.sigma, 0.0);
  EXPECT_EQ(ez.lambda_dual, 0.0);
}

TEST(Membrane, RT0MassIsSymmetricPositiveDefinite) {
  const Mesh m = make_domain(Domain::lshape_paper, 1);
  const Matrix A = rt0_mass(m);
  EXPECT_LT((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(A).eigenvalues().minCoeff(), 0);
}
