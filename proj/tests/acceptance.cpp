// Acceptance run: one PASS/FAIL line per criterion, details on the following
// indented lines. Exit status is the number of failed criteria.

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "battery.hpp"
#include "obstacle/adapt.hpp"
#include "obstacle/oracle.hpp"
#include "obstacle/postproc.hpp"
#include "obstacle/quadrature.hpp"
#include "support.hpp"

using namespace obstacle;
using testing_support::eoc;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("C%-2d %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::istringstream in(detail);
  for (std::string l; std::getline(in, l);) std::printf("      %s\n", l.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string num(double v, int prec = 4) {
  char b[64];
  std::snprintf(b, sizeof b, "%.*g", prec, v);
  return b;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Series {
  std::vector<double> nelems, dofs;
  std::map<std::string, std::vector<double>> col;
  void add(const ConvergenceRecord& r) {
    nelems.push_back(r.nelems);
    dofs.push_back(r.dofs);
    for (const auto& [k, v] : r.errors) col[k].push_back(v);
    for (const auto& [k, v] : r.estimators) col[k].push_back(v);
  }
};

Series series(const LoopResult& r) {
  Series s;
  for (const auto& rec : r.records) s.add(rec);
  return s;
}

std::string table(const Series& s, const std::vector<std::string>& cols) {
  std::ostringstream os;
  os << "#T dofs";
  for (const auto& c : cols) os << ' ' << c;
  os << '\n';
  for (size_t i = 0; i < s.nelems.size(); ++i) {
    os << s.nelems[i] << ' ' << s.dofs[i];
    for (const auto& c : cols) os << ' ' << num(s.col.at(c)[i]);
    os << '\n';
  }
  return os.str();
}

// sqrt(a^2 + b^2) columnwise
std::vector<double> hypot_cols(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = std::hypot(a[i], b[i]);
  return r;
}

// ---- C1 / C2 / C3 ----------------------------------------------------------------

struct MembraneCheck {
  double worst_div = 0, worst_orth = 0, worst_comp = 0, worst_feas = 0;
  int solves = 0;
  bool ok = true;
  void operator()(const LevelData& d, const Example& ex) {
    const MembraneProperties r = check_membrane_properties(*d.membrane, {d.mesh, ex.f, ex.g});
    worst_div = std::max(worst_div, r.divergence / r.scale);
    worst_orth = std::max(worst_orth, r.orthogonality);
    worst_comp = std::max(worst_comp, r.complementarity / r.scale);
    worst_feas = std::min(worst_feas, r.feasibility);
    ok = ok && r.divergence <= 1e-9 * r.scale && r.orthogonality <= 1e-9 &&
         r.complementarity <= 1e-9 * r.scale && r.feasibility >= -1e-10;
    ++solves;
  }
};

MembraneCheck membrane_checks;

void criteria_membrane_smooth() {
  const Example& ex = ExampleRegistry::instance().find("smooth-square");
  LoopConfig cfg;
  cfg.max_levels = 6;
  const auto t0 = std::chrono::steady_clock::now();
  const LoopResult r = adaptive_loop(ex, cfg, [&](const LevelData& d) { membrane_checks(d, ex); });
  const double secs = seconds_since(t0);
  if (!r.ok()) {
    report(1, false, "membrane smooth EOC", "solver failure: " + r.error);
    report(2, false, "membrane smooth estimator", "no data");
    return;
  }
  const Series s = series(r);
  const double eu = eoc(s.nelems, s.col.at("error_u"), 3);
  const double es = eoc(s.nelems, s.col.at("error_sigma"), 3);
  report(1, within(eu, 0.40, 0.60) && within(es, 0.40, 0.60) && s.nelems.size() >= 6 && secs <= 300,
         "membrane smooth, uniform: EOC of ||u-u_h||, ||sigma-sigma_h|| in [0.40, 0.60]",
         "EOC u " + num(eu) + ", sigma " + num(es) + ", " + num(secs, 3) + " s\n" +
             table(s, {"error_u", "error_sigma", "error_J"}));

  const double et = eoc(s.nelems, s.col.at("est_total"), 3);
  std::string detail = "EOC total " + num(et);
  bool ok = within(et, 0.40, 0.60);
  for (const char* c : {"est_r", "est_p", "est_c"}) {
    const double v = eoc(s.nelems, s.col.at(c), 3);
    detail += std::string(", ") + c + " " + num(v);
  }
  const auto err = hypot_cols(s.col.at("error_J"), s.col.at("error_sigma"));
  double lo = 1e300, hi = 0;
  for (size_t i = err.size() - 4; i < err.size(); ++i) {
    const double eff = err[i] / s.col.at("est_total")[i];
    lo = std::min(lo, eff);
    hi = std::max(hi, eff);
  }
  ok = ok && hi / lo < 2;
  detail += "\neffectivity over the last 4 levels in [" + num(lo) + ", " + num(hi) + "], ratio " + num(hi / lo);
  report(2, ok, "membrane smooth estimator: EOC in [0.40, 0.60], effectivity varies < x2",
         detail + "\n" + table(s, {"est_total", "est_r", "est_p", "est_c", "osc"}));
}

// ---- C4 ------------------------------------------------------------------------

void criterion_battery() {
  int mem = 0, pl = 0, bad = 0;
  double worst = 0;
  std::string detail;
  for (const auto& c : testing_support::small_battery()) {
    const ComplementaritySystem sys = testing_support::assemble_case(c);
    if (sys.num_pairs() > 16) continue;
    (c.plate ? pl : mem)++;
    const PdasResult p = solve_pdas(sys, {});
    const BruteForceResult b = brute_force_active_set(sys);
    const double d = (p.x - b.x).cwiseAbs().maxCoeff() / std::max(1.0, b.x.cwiseAbs().maxCoeff());
    worst = std::max(worst, d);
    if (p.active != b.active || d > 1e-10) {
      ++bad;
      detail += "mismatch: " + c.name + "\n";
    }
  }
  report(4, bad == 0 && mem >= 10 && pl >= 3, "PDAS agrees with active-set enumeration on the battery",
         std::to_string(mem) + " membrane + " + std::to_string(pl) + " plate cases, worst relative difference " +
             num(worst) + "\n" + detail);
}

// ---- C5 ------------------------------------------------------------------------

// mean element area over the mesh divided by the mean area of the elements
// whose centroid lies within r of c
double concentration(const Mesh& m, const Vec2& c, double r) {
  double all = 0, near = 0;
  int n = 0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    all += m.area(t);
    if ((m.centroid(t) - c).norm() < r) {
      near += m.area(t);
      ++n;
    }
  }
  if (n == 0) return 0;
  return (all / m.num_triangles()) / (near / n);
}

void criterion_lshape() {
  const Example& ex = ExampleRegistry::instance().find("lshape-pyramid");
  LoopConfig cfg;
  cfg.max_levels = 6;
  const LoopResult u = adaptive_loop(ex, cfg, [&](const LevelData& d) { membrane_checks(d, ex); });
  cfg.mode = RefineMode::adaptive;
  cfg.max_levels = 40;
  cfg.max_elements = 12000;
  Mesh last;
  const LoopResult a = adaptive_loop(ex, cfg, [&](const LevelData& d) {
    membrane_checks(d, ex);
    last = *d.mesh;
  });
  if (!u.ok() || !a.ok()) {
    report(5, false, "L-shape membrane", "solver failure: " + u.error + a.error);
    return;
  }
  const Series su = series(u), sa = series(a);
  const double eu = eoc(su.nelems, su.col.at("est_total"), 3);
  // adaptive levels grow by a factor < 2; fit over the last half of the run
  const int k = std::max(3, static_cast<int>(sa.nelems.size()) / 2);
  const double ea = eoc(sa.nelems, sa.col.at("est_total"), k);
  const double c0 = concentration(last, Vec2(0, 0), 0.1);
  const double c1 = concentration(last, Vec2(0.5, 0.5), 0.1);
  report(5, within(eu, 0.26, 0.40) && within(ea, 0.42, 0.58) && c0 >= 3 && c1 >= 3,
         "L-shape membrane: uniform EOC in [0.26, 0.40], adaptive in [0.42, 0.58], refinement at (0,0) and (1/2,1/2)",
         "uniform EOC " + num(eu) + ", adaptive EOC " + num(ea) + " (last " + std::to_string(k) +
             " levels)\nconcentration near (0,0): " + num(c0) + ", near (1/2,1/2): " + num(c1) + "\n" +
             table(su, {"est_total"}) + table(sa, {"est_total"}));
}

// ---- C6 / C7 / C8 -----------------------------------------------------------------

struct PlateCheck {
  double worst_div = 0, worst_orth = 0, worst_comp = 0;
  int solves = 0;
  bool ok = true;
  void operator()(const LevelData& d, const Example& ex) {
    const PlateProperties r = check_plate_properties(*d.plate, {d.mesh, ex.f, ex.g});
    worst_div = std::max(worst_div, r.divdiv / r.scale);
    worst_orth = std::max(worst_orth, r.orthogonality);
    worst_comp = std::max(worst_comp, r.complementarity / r.scale);
    ok = ok && r.divdiv <= 1e-8 * r.scale && r.orthogonality <= 1e-8 && r.complementarity <= 1e-8 * r.scale;
    ++solves;
  }
};

PlateCheck plate_checks;

void criterion_plate_smooth() {
  const Example& ex = ExampleRegistry::instance().find("plate_smooth");
  LoopConfig cfg;
  cfg.max_levels = 6;
  const auto t0 = std::chrono::steady_clock::now();
  const LoopResult r = adaptive_loop(ex, cfg, [&](const LevelData& d) { plate_checks(d, ex); });
  const double secs = seconds_since(t0);
  if (!r.ok()) {
    report(6, false, "plate smooth", "solver failure: " + r.error);
    return;
  }
  const Series s = series(r);
  const double eu = eoc(s.dofs, s.col.at("error_u"), 3);
  const double em = eoc(s.dofs, s.col.at("error_M"), 3);
  const double ex_ = eoc(s.dofs, s.col.at("est_r_osc"), 3);
  report(6, within(eu, 0.85, 1.15) && within(em, 0.85, 1.15) && within(ex_, 0.85, 1.15) && secs <= 900,
         "plate smooth, uniform: EOC of ||u-u_h||, ||M-M_h||, sqrt(xi_r^2+osc^2) vs dofs in [0.85, 1.15]",
         "EOC u " + num(eu) + ", M " + num(em) + ", sqrt(xi_r^2+osc^2) " + num(ex_) + ", " + num(secs, 3) +
             " s\n" + table(s, {"error_u", "error_M", "est_r", "osc", "est_r_osc"}));
}

void criterion_plate_lshapes() {
  bool ok = true;
  std::string detail;
  for (const char* id : {"plate_ellipse_lshape", "plate_nonsmooth_lshape"}) {
    const Example& ex = ExampleRegistry::instance().find(id);
    LoopConfig cfg;
    // the nonsmooth obstacle is still pre-asymptotic at 90k dofs (level slope 0.41)
    cfg.max_levels = std::string(id) == "plate_nonsmooth_lshape" ? 6 : 5;
    const LoopResult u = adaptive_loop(ex, cfg, [&](const LevelData& d) { plate_checks(d, ex); });
    cfg.mode = RefineMode::adaptive;
    cfg.max_levels = 40;
    cfg.max_elements = 4000;
    const LoopResult a = adaptive_loop(ex, cfg, [&](const LevelData& d) { plate_checks(d, ex); });
    if (!u.ok() || !a.ok()) {
      ok = false;
      detail += std::string(id) + ": solver failure " + u.error + a.error + "\n";
      continue;
    }
    const Series su = series(u), sa = series(a);
    const double eu = eoc(su.dofs, su.col.at("est_r_osc"), 3);
    const int k = std::max(3, static_cast<int>(sa.dofs.size()) / 2);
    const double ea = eoc(sa.dofs, sa.col.at("est_r_osc"), k);
    ok = ok && within(eu, 0.20, 0.35) && within(ea, 0.85, 1.15);
    detail += std::string(id) + ": uniform EOC " + num(eu) + ", adaptive EOC " + num(ea) + " (last " +
              std::to_string(k) + " levels)\n" + table(su, {"est_r_osc", "est_total"}) +
              table(sa, {"est_r_osc", "est_total"});
  }
  report(8, ok, "plate L-shapes: sqrt(xi_r^2+osc^2) EOC uniform in [0.20, 0.35], adaptive in [0.85, 1.15]",
         detail);
}

// ---- C9 ------------------------------------------------------------------------

void criterion_divdiv() {
  std::mt19937 rng(2024);
  std::normal_distribution<double> G;
  double worst = 0, control = 1e300;
  int meshes = 0;
  for (const Mesh& m : {make_domain(Domain::unit_square, 1), testing_support::criss_cross(),
                        make_domain(Domain::lshape_paper, 1)}) {
    const DivDivConstraints c = build_divdiv_constraints(m);
    const Matrix K = Eigen::FullPivLU<Matrix>(Matrix(c.C)).kernel();
    for (int trial = 0; trial < 100; ++trial) {
      Vector a(K.cols());
      for (int i = 0; i < a.size(); ++i) a[i] = G(rng);
      worst = std::max(worst, divdiv_pairing_check(m, XField{K * a}, 10, 1000 + trial));
      XField B{Vector(K.rows())};
      for (int i = 0; i < B.c.size(); ++i) B.c[i] = G(rng);
      control = std::min(control, divdiv_pairing_check(m, B, 10, 1000 + trial));
    }
    ++meshes;
  }
  report(9, worst <= 1e-8 && control > 1e-2, "divDiv conformity of constrained fields",
         std::to_string(meshes) + " meshes x 100 fields: worst mismatch " + num(worst) +
             ", smallest unconstrained mismatch " + num(control));
}

// ---- C10 -----------------------------------------------------------------------

struct Triple {
  P1cField v;
  RT0Field tau;
  P0Field mu;
};

void criterion_norm_equivalence() {
  const Mesh m = make_domain(Domain::unit_square, 2);
  std::mt19937 rng(99);
  std::normal_distribution<double> G;
  std::uniform_real_distribution<double> E(-1, 1);
  const TriQuad& q = tri_rule(2);
  double lo = 1e300, hi = 0, drift = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double sv = std::pow(10, E(rng)), st = std::pow(10, E(rng)), sm = std::pow(10, E(rng));
    Triple x{P1cField{Vector(m.num_vertices())}, RT0Field{Vector(m.num_edges())}, P0Field{Vector(m.num_triangles())}};
    for (int z = 0; z < m.num_vertices(); ++z) x.v.c[z] = m.is_boundary_vertex(z) ? 0 : sv * G(rng);
    for (int e = 0; e < m.num_edges(); ++e) x.tau.c[e] = st * G(rng);
    for (int t = 0; t < m.num_triangles(); ++t) x.mu.c[t] = sm * G(rng);

    double grad_v = 0, tau2 = 0, diff = 0, pair = 0;
    for (int t = 0; t < m.num_triangles(); ++t) {
      const ElementGeometry g(m, t);
      const auto& vt = m.triangle(t);
      Vec2 gv = Vec2::Zero();
      for (int k = 0; k < 3; ++k) gv += x.v.c[vt[k]] * g.grad_lambda[k];
      grad_v += g.area * gv.squaredNorm();
      for (int i = 0; i < q.size(); ++i) {
        const Vec2 tv = x.tau.value(m, g, t, g.point(q.bary[i]));
        tau2 += q.w[i] * g.area * tv.squaredNorm();
        diff += q.w[i] * g.area * (tv - gv).squaredNorm();
      }
      pair += x.mu.c[t] * g.area * (x.v.c[vt[0]] + x.v.c[vt[1]] + x.v.c[vt[2]]) / 3;
    }
    auto mu = [&](const Vec2&, int t) { return x.mu.c[t]; };
    auto res = [&](const Vec2&, int t) { return x.tau.div(m, t) + x.mu.c[t]; };
    double ratio[2];
    for (int lvl = 0; lvl < 2; ++lvl) {
      const double dm = discrete_dual_norm(m, mu, 1, 2 + lvl);
      const double dr = discrete_dual_norm(m, res, 1, 2 + lvl);
      ratio[lvl] = (grad_v + tau2 + dm * dm) / (dr * dr + diff + pair);
    }
    lo = std::min(lo, ratio[0]);
    hi = std::max(hi, ratio[0]);
    drift = std::max(drift, std::abs(ratio[1] - ratio[0]) / ratio[0]);
  }
  report(10, lo >= 1.0 / 50 && hi <= 50 && drift < 0.2, "norm equivalence with discrete dual norms",
         "50 triples: ratio in [" + num(lo) + ", " + num(hi) + "], largest drift under refinement " +
             num(drift));
}

// ---- C11 -----------------------------------------------------------------------

void criterion_postproc() {
  const Mesh m = make_domain(Domain::lshape_paper, 1);
  const HctSpace s(m);
  std::mt19937 rng(5);
  std::normal_distribution<double> G;
  std::uniform_real_distribution<double> U(0.02, 0.98);
  const TriQuad& q = tri_rule(12);
  double wb = 0, wj = 0, wc = 0;
  for (int trial = 0; trial < 100; ++trial) {
    P3bField v{Vector(10 * m.num_triangles())};
    for (int i = 0; i < v.c.size(); ++i) v.c[i] = G(rng);
    const Vector target = p3_moments(m, v);
    const double scale = std::max(1.0, target.cwiseAbs().maxCoeff());
    // Pi1 B_h v = Pi1 v: moments of the bubble field
    const BubbleField b = b_h(m, v);
    const SmoothedField J = j_h_hct(s, v);
    for (int t = 0; t < m.num_triangles(); ++t) {
      const ElementGeometry g(m, t);
      Eigen::Vector3d mb = Eigen::Vector3d::Zero(), mj = Eigen::Vector3d::Zero();
      for (int i = 0; i < q.size(); ++i) {
        const double bv = b.eval(g, t, q.bary[i]).v;
        for (int k = 0; k < 3; ++k) mb[k] += q.w[i] * g.area * bv * q.bary[i][k];
      }
      const HctElement E(m, t);
      for (int sub = 0; sub < 3; ++sub) {
        const auto pc = E.sub_corners(sub);
        for (int i = 0; i < q.size(); ++i) {
          const Vec2 x = bary_point(pc, q.bary[i]);
          const auto l = g.bary(x);
          const double jv = J.eval(s, t, x).v;
          for (int k = 0; k < 3; ++k) mj[k] += q.w[i] * g.area / 3 * jv * l[k];
        }
      }
      for (int k = 0; k < 3; ++k) {
        wb = std::max(wb, std::abs(mb[k] - target[3 * t + k]) / scale);
        wj = std::max(wj, std::abs(mj[k] - target[3 * t + k]) / scale);
      }
    }
    double gscale = 1;
    for (int e = 0; e < m.num_edges(); ++e) {
      const auto tr = m.edge_triangles(e);
      const Vec2 a = m.vertex(m.edge(e)[0]), c = m.vertex(m.edge(e)[1]);
      for (int k = 0; k < 3; ++k) {
        const Vec2 x = a + U(rng) * (c - a);
        const Jet2 u = J.eval(s, tr[0], x);
        gscale = std::max(gscale, u.g.norm());
        if (tr[1] < 0) {
          wc = std::max({wc, std::abs(u.v) / gscale, std::abs(u.g.dot(m.edge_normal(e))) / gscale});
        } else {
          const Jet2 w = J.eval(s, tr[1], x);
          wc = std::max({wc, std::abs(u.v - w.v) / gscale, (u.g - w.g).norm() / gscale});
        }
      }
    }
  }
  report(11, wb <= 1e-11 && wj <= 1e-11 && wc <= 1e-9, "postprocessing identities on 100 random P3 fields",
         "moment defect B_h " + num(wb) + ", J_h " + num(wj) + "; C1 jump " + num(wc));
}

// ---- C12 -----------------------------------------------------------------------

// smallest eigenvalue of B H^-1 B^T relative to Q, with H given by a sparse
// factorization of a (possibly constrained) system and B of width H.rows()
double smallest_generalized(const SparseMatrix& K, const Matrix& Bt, int n, const Matrix& Q) {
  Eigen::SparseLU<SparseMatrix> lu(K);
  if (lu.info() != Eigen::Success) return 0;
  const Matrix X = lu.solve(Bt);
  const Matrix S = Bt.topRows(n).transpose() * X.topRows(n);
  const Matrix Ss = 0.5 * (S + S.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(Ss, Q);
  return std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
}

double membrane_inf_sup(const Mesh& m) {
  const int ne = m.num_edges(), nt = m.num_triangles();
  Matrix Bt = Matrix::Zero(ne, nt);
  for (int e = 0; e < ne; ++e) {
    RT0Field u{Vector::Zero(ne)};
    u.c[e] = 1;
    for (int t : m.edge_triangles(e))
      if (t >= 0) Bt(e, t) = u.div(m, t);
  }
  Matrix Q = Matrix::Zero(nt, nt);
  for (int t = 0; t < nt; ++t) Q(t, t) = m.area(t);
  const Matrix D = Bt * Q * Bt.transpose();
  const SparseMatrix H = rt0_mass(m) + SparseMatrix(D.sparseView());
  // coupling (div tau, q) carries the element areas
  return smallest_generalized(H, Bt * Q, ne, Q);
}

double plate_inf_sup(const Mesh& m) {
  const int nt = m.num_triangles(), nx = kXDim * nt;
  const DivDivConstraints c = build_divdiv_constraints(m);
  const int nc = c.rows();
  std::vector<Triplet> trip;
  Matrix Bt = Matrix::Zero(nx + nc, 3 * nt);
  Matrix Q = Matrix::Zero(3 * nt, 3 * nt);
  for (int t = 0; t < nt; ++t) {
    const PlateLocal L = plate_local(m, t);
    const Eigen::Matrix<double, kXDim, kXDim> H = L.A + L.D.transpose() * L.M.inverse() * L.D;
    for (int a = 0; a < kXDim; ++a)
      for (int b = 0; b < kXDim; ++b) trip.emplace_back(kXDim * t + a, kXDim * t + b, H(a, b));
    Bt.block(kXDim * t, 3 * t, kXDim, 3) = L.D.transpose();
    Q.block<3, 3>(3 * t, 3 * t) = L.M;
  }
  for (int k = 0; k < c.C.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(c.C, k); it; ++it) {
      trip.emplace_back(nx + it.row(), it.col(), it.value());
      trip.emplace_back(it.col(), nx + it.row(), it.value());
    }
  SparseMatrix K(nx + nc, nx + nc);
  K.setFromTriplets(trip.begin(), trip.end());
  return smallest_generalized(K, Bt, nx, Q);
}

void criterion_inf_sup() {
  std::vector<double> bm, bp;
  std::string detail = "#T membrane plate\n";
  Mesh m = make_domain(Domain::unit_square, 1);
  for (int level = 0; level < 4; ++level) {
    bm.push_back(membrane_inf_sup(m));
    bp.push_back(plate_inf_sup(m));
    detail += std::to_string(m.num_triangles()) + ' ' + num(bm.back(), 6) + ' ' + num(bp.back(), 6) + '\n';
    m = refine_uniform(m);
  }
  auto var = [](const std::vector<double>& v) {
    const auto [a, b] = std::minmax_element(v.begin(), v.end());
    return (*b - *a) / *b;
  };
  const bool ok = *std::min_element(bm.begin(), bm.end()) > 0 && *std::min_element(bp.begin(), bp.end()) > 0 &&
                  var(bm) < 0.2 && var(bp) < 0.2;
  report(12, ok, "discrete inf-sup constants positive and stable (< 20% variation)",
         detail + "variation membrane " + num(var(bm)) + ", plate " + num(var(bp)));
}

// ---- C13 -----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism() {
  const fs::path base = fs::temp_directory_path() / "obstacle_acceptance";
  fs::remove_all(base);
  bool ok = true;
  std::string detail;
  const std::vector<std::string> runs = {
      "membrane --example lshape-pyramid --mode adaptive --levels 8",
      "plate --example plate_ellipse_lshape --mode adaptive --levels 4",
  };
  for (size_t i = 0; i < runs.size(); ++i) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = base / (std::to_string(i) + "_" + std::to_string(rep));
      const std::string cmd = std::string(OBSTACLE_MFEM_BIN) + " " + runs[i] + " --out " + out.string() +
                              (rep ? " --threads 2" : "") + " > /dev/null 2>&1";
      const int st = std::system(cmd.c_str());
      if (!WIFEXITED(st) || WEXITSTATUS(st) != 0) {
        ok = false;
        detail += "run failed: " + runs[i] + "\n";
        break;
      }
      const std::string tables = slurp(out / "errors.dat") + slurp(out / "estimators.dat");
      if (rep == 0)
        first = tables;
      else if (tables != first) {
        ok = false;
        detail += "tables differ: " + runs[i] + "\n";
      }
    }
  }
  report(13, ok, "repeated CLI runs give bitwise identical tables", detail + std::to_string(runs.size()) +
                                                                        " configurations, 2 runs each (1 and 2 threads)");
}

}  // namespace

int main() {
  std::printf("acceptance (linear solver: %s)\n", LUSolver().backend());
  const auto t0 = std::chrono::steady_clock::now();
  criteria_membrane_smooth();
  criterion_lshape();
  report(3, membrane_checks.ok && membrane_checks.solves > 0, "membrane discrete identities at every solve",
         std::to_string(membrane_checks.solves) + " solves: div " + num(membrane_checks.worst_div) +
             "*scale, orthogonality " + num(membrane_checks.worst_orth) + ", complementarity " +
             num(membrane_checks.worst_comp) + "*scale, min(u - Pi0 g) " + num(membrane_checks.worst_feas));
  criterion_battery();
  criterion_plate_smooth();
  criterion_plate_lshapes();
  report(7, plate_checks.ok && plate_checks.solves > 0, "plate discrete identities at every solve",
         std::to_string(plate_checks.solves) + " solves: divDiv " + num(plate_checks.worst_div) +
             "*scale, orthogonality " + num(plate_checks.worst_orth) + ", complementarity " +
             num(plate_checks.worst_comp) + "*scale");
  criterion_divdiv();
  criterion_norm_equivalence();
  criterion_postproc();
  criterion_inf_sup();
  criterion_determinism();
  std::printf("%d criteria failed, %.0f s\n", failures, seconds_since(t0));
  return failures;
}
