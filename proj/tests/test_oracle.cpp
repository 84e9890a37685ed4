#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <fstream>
#include <regex>
#include <sstream>

#include "battery.hpp"
#include "obstacle/examples.hpp"
#include "obstacle/oracle.hpp"
#include "support.hpp"

using namespace obstacle;

namespace {

// Dense P1 Galerkin solution of -Laplace w = 1 with w = 0 on the boundary.
Vector dense_poisson_p1(const Mesh& m) {
  const int n = m.num_vertices();
  Matrix K = Matrix::Zero(n, n);
  Vector b = Vector::Zero(n);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto p = m.corners(t);
    const auto& v = m.triangle(t);
    const double area = m.area(t);
    std::array<Vec2, 3> gl;
    for (int k = 0; k < 3; ++k) {
      const Vec2 e = p[(k + 2) % 3] - p[(k + 1) % 3];
      gl[k] = Vec2(e.y(), -e.x()) / (2 * area);
    }
    for (int i = 0; i < 3; ++i) {
      b[v[i]] += area / 3;
      for (int j = 0; j < 3; ++j) K(v[i], v[j]) += area * gl[i].dot(gl[j]);
    }
  }
  for (int z = 0; z < n; ++z)
    if (m.is_boundary_vertex(z)) {
      K.row(z).setZero();
      K.col(z).setZero();
      K(z, z) = 1;
      b[z] = 0;
    }
  return K.ldlt().solve(b);
}

double l2_p0_p1(const Mesh& m, const P0Field& a, const P1cField& b) {
  // || a - Pi0 b ||: the P1 mean on a triangle is the vertex average
  double s = 0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& v = m.triangle(t);
    const double mean = (b.c[v[0]] + b.c[v[1]] + b.c[v[2]]) / 3;
    s += m.area(t) * std::pow(a.c[t] - mean, 2);
  }
  return std::sqrt(s);
}

}  // namespace

TEST(PrimalOracle, InactiveEqualsPoisson) {
  const Mesh m = make_domain(Domain::lshape_paper, 2);
  const PrimalResult r = primal_p1_obstacle(m, ScalarData::constant(1), ScalarData::constant(-100));
  EXPECT_LE(r.kkt_residual, 1e-10);
  const Vector w = dense_poisson_p1(m);
  EXPECT_LT((r.u.c - w).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(PrimalOracle, ConvergenceAndMixedCrossCheck) {
  const Example ex = membrane_smooth_example();
  Mesh m = make_domain(ex.domain, 1);
  std::vector<double> n, e_p1, e_mix;
  for (int level = 0; level < 4; ++level) {
    const PrimalResult r = primal_p1_obstacle(m, ex.f, ex.g);
    EXPECT_LE(r.kkt_residual, 1e-10);
    double s = 0;
    for (int t = 0; t < m.num_triangles(); ++t) {
      // vertex-value error as a cheap L2 surrogate
      const auto& v = m.triangle(t);
      for (int k = 0; k < 3; ++k)
        s += m.area(t) / 3 * std::pow(r.u.c[v[k]] - ex.u_exact->value(m.vertex(v[k])), 2);
    }
    const MembraneSolution mix = solve_membrane({&m, ex.f, ex.g}, {});
    n.push_back(m.num_triangles());
    e_p1.push_back(std::sqrt(s));
    e_mix.push_back(l2_p0_p1(m, mix.u, r.u));
    m = refine_uniform(m);
  }
  // second order in h for P1, first order for the mixed/P1 difference
  EXPECT_GT(testing_support::eoc(n, e_p1, 3), 0.85);
  EXPECT_GT(testing_support::eoc(n, e_mix, 3), 0.4);
}

TEST(BruteForce, InactiveSelectsEmptySet) {
  const Mesh m = make_domain(Domain::unit_square, 1);
  const MembraneSystem ms = assemble_membrane({&m, ScalarData::constant(1), ScalarData::constant(-1)});
  const BruteForceResult b = brute_force_active_set(ms.sys);
  EXPECT_EQ(b.feasible, 1);
  for (char a : b.active) EXPECT_EQ(a, 0);
}

TEST(BruteForce, RejectsLargeSystems) {
  const Mesh m = make_domain(Domain::unit_square, 2);  // 32 pairs
  const MembraneSystem ms = assemble_membrane({&m, ScalarData::constant(1), ScalarData::constant(-1)});
  EXPECT_THROW(brute_force_active_set(ms.sys), Error);
}

TEST(BruteForce, PlateOnTwoTriangles) {
  const auto cases = testing_support::small_battery();
  for (const auto& c : cases) {
    if (!c.plate || c.mesh.num_triangles() != 2) continue;
    const ComplementaritySystem sys = testing_support::assemble_case(c);
    EXPECT_EQ(sys.num_pairs(), 6);
    const BruteForceResult b = brute_force_active_set(sys);
    const PdasResult r = solve_pdas(sys, {});
    EXPECT_EQ(b.active, r.active);
  }
}

TEST(DualNorm, ZeroAndSelfConvergence) {
  const Mesh m = make_domain(Domain::unit_square, 1);
  EXPECT_EQ(discrete_dual_norm(m, [](const Vec2&, int) { return 0.0; }, 1, 2), 0.0);
  std::vector<double> v;
  for (int r = 2; r <= 5; ++r) v.push_back(discrete_dual_norm(m, [](const Vec2&, int) { return 1.0; }, 1, r));
  for (size_t i = 1; i < v.size(); ++i) EXPECT_GT(v[i], v[i - 1]);  // Galerkin energies increase
  EXPECT_LT(std::abs(v[3] - v[2]) / v[3], 0.02);
  // the P1 energy norm on a level equals sqrt(b.w) of the dense solve
  const Mesh fine = refine_uniform(refine_uniform(m));
  const Vector w = dense_poisson_p1(fine);
  double bw = 0;
  for (int t = 0; t < fine.num_triangles(); ++t)
    for (int z : fine.triangle(t)) bw += fine.area(t) / 3 * w[z];
  EXPECT_NEAR(v[0], std::sqrt(bw), 1e-10);
}

TEST(DualNorm, SecondOrder) {
  const Mesh m = make_domain(Domain::unit_square, 1);
  const double a = discrete_dual_norm(m, [](const Vec2&, int) { return 1.0; }, 2, 1);
  const double b = discrete_dual_norm(m, [](const Vec2&, int) { return 1.0; }, 2, 2);
  EXPECT_GT(a, 0);
  EXPECT_GE(b, a * (1 - 1e-12));
  EXPECT_LT((b - a) / b, 0.05);
}

TEST(OracleStructure, NoSharedAssemblyPaths) {
  std::ifstream in(std::string(OBSTACLE_SOURCE_DIR) + "/src/oracle.cpp");
  ASSERT_TRUE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string src = ss.str();
  const std::regex inc(R"(#include\s+"([^"]+)\")");
  std::vector<std::string> includes;
  for (auto it = std::sregex_iterator(src.begin(), src.end(), inc); it != std::sregex_iterator(); ++it)
    includes.push_back((*it)[1]);
  for (const auto& h : includes)
    for (const char* bad : {"quadrature.hpp", "membrane.hpp", "plate.hpp", "projection.hpp",
                            "linsys.hpp", "postproc.hpp", "estimate.hpp"})
      EXPECT_EQ(h.find(bad), std::string::npos) << h;
  // no calls into the main assembly or solver routines
  for (const char* fn : {"tri_rule(", "assemble_membrane(", "assemble_plate(", "factor_solve(",
                         "certified_solve(", "plate_local(", "element_integrals(", "solve_pdas("})
    EXPECT_EQ(src.find(fn), std::string::npos) << fn;
}
