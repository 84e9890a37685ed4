#include "obstacle/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "obstacle/hct.hpp"

namespace obstacle {

std::vector<int> mark_bulk(const Vector& indicators, double theta) {
  if (!(theta > 0 && theta <= 1)) throw Error("mark_bulk: theta must lie in (0, 1]");
  const int n = static_cast<int>(indicators.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicators[a] > indicators[b]; });
  // the total is summed in the same order as the prefix so theta = 1 is exact
  double total = 0;
  for (int i : order) total += indicators[i];
  std::vector<int> marked;
  if (total <= 0) return marked;
  double acc = 0;
  for (int i : order) {
    marked.push_back(i);
    acc += indicators[i];
    if (acc >= theta * total) break;
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

namespace {

void add_membrane_level(const Example& ex, const LoopConfig& cfg, const Mesh& m,
                        ConvergenceRecord& rec, Vector& mark,
                        const std::function<void(const LevelData&)>& on_level, int level) {
  MembraneProblem p{&m, ex.f, ex.g, cfg.quad_order};
  const MembraneSolution s = solve_membrane(p, cfg.pdas);
  const MembranePost post = membrane_postprocess(m, s);
  const EstimatorReport r = estimate_membrane(s, p, post.Ju);
  rec.dofs = m.num_edges() + 2L * m.num_triangles();
  rec.pdas_iters = s.iterations;
  rec.estimators["est_r"] = r.total("rho_r");
  rec.estimators["est_p"] = r.total("rho_p");
  rec.estimators["est_c"] = r.total("rho_c");
  rec.estimators["osc"] = r.total("osc");
  rec.estimators["est_total"] = r.est();
  rec.estimators["u_Ju"] = r.total("u_Ju");
  if (ex.u_exact) {
    const ScalarData lam = ex.lambda_exact ? *ex.lambda_exact : ScalarData::constant(0);
    const MembraneErrors e = membrane_errors(s, p, *ex.u_exact, lam, cfg.dual_ref_levels);
    rec.errors["error_u"] = e.u;
    rec.errors["error_sigma"] = e.sigma;
    rec.errors["error_J"] = membrane_postproc_error(m, *ex.u_exact, post.Ju);
    if (e.lambda_dual >= 0) rec.errors["error_lambda"] = e.lambda_dual;
  }
  mark = r.marking();
  if (on_level) on_level({level, &m, &s, nullptr, &r});
}

void add_plate_level(const Example& ex, const LoopConfig& cfg, const Mesh& m,
                     ConvergenceRecord& rec, Vector& mark,
                     const std::function<void(const LevelData&)>& on_level, int level) {
  PlateProblem p{&m, ex.f, ex.g, cfg.quad_order};
  const PlateSystem ps = assemble_plate(p);
  const PlateSolution s = solve_plate(p, ps, cfg.pdas);
  const HctSpace space(m);
  const PlatePost post = plate_postprocess(space, s);
  const EstimatorReport r = estimate_plate(s, p, space, post, cfg.eps);
  rec.dofs = plate_dofs(m, ps.cons);
  rec.pdas_iters = s.iterations;
  const double xr = r.total("xi_r"), os = r.total("osc"), xp = r.total("xi_p"),
               xc = r.total("xi_c");
  rec.estimators["est_r"] = xr;
  rec.estimators["est_pxi"] = xp;
  rec.estimators["est_c"] = xc;
  rec.estimators["osc"] = os;
  rec.estimators["est_total"] = r.est();
  rec.estimators["xi_inf"] = r.xi_inf;
  rec.estimators["lambda_h_omega"] = r.lambda_omega;
  rec.estimators["est_r_osc"] = std::hypot(xr, os);
  rec.estimators["est_c_p"] = std::hypot(xc, xp);
  rec.estimators["est_inf"] = std::sqrt(std::max(0.0, r.lambda_omega) * r.xi_inf);
  if (ex.u_exact) {
    const PlateErrors e = plate_errors(s, p, *ex.u_exact,
                                       ex.lambda_exact ? &*ex.lambda_exact : nullptr,
                                       cfg.dual_ref_levels);
    rec.errors["error_u"] = e.u;
    rec.errors["error_M"] = e.M;
    if (e.lambda_dual >= 0) rec.errors["error_lambda"] = e.lambda_dual;
  }
  mark = r.marking();
  if (on_level) on_level({level, &m, nullptr, &s, &r});
}

}  // namespace

LoopResult adaptive_loop(const Example& ex, const LoopConfig& cfg,
                         const std::function<void(const LevelData&)>& on_level) {
  LoopResult out;
  const int init = cfg.initial_refinements >= 0 ? cfg.initial_refinements : ex.initial_refinements;
  Mesh m = make_domain(ex.domain, init);
  for (int level = 0; level < cfg.max_levels; ++level) {
    if (cfg.max_elements > 0 && m.num_triangles() > cfg.max_elements) break;
    ConvergenceRecord rec;
    rec.level = level;
    rec.nelems = m.num_triangles();
    Vector mark;
    try {
      if (ex.kind == ProblemKind::membrane)
        add_membrane_level(ex, cfg, m, rec, mark, on_level, level);
      else
        add_plate_level(ex, cfg, m, rec, mark, on_level, level);
    } catch (const std::exception& e) {
      out.error = e.what();
      return out;
    }
    out.records.push_back(rec);
    if (cfg.max_dofs > 0 && rec.dofs >= cfg.max_dofs) break;
    if (level + 1 == cfg.max_levels) break;
    if (cfg.mode == RefineMode::uniform) {
      m = refine_uniform(m);
    } else {
      const auto marked = mark_bulk(mark, cfg.theta);
      if (marked.empty()) break;
      m = refine_nvb(m, marked);
    }
  }
  return out;
}

}  // namespace obstacle
