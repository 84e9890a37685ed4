// obstacle-mfem: convergence experiments for the membrane and plate obstacle
// problems. Writes errors.dat / estimators.dat (plus run.json) per run.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "obstacle/adapt.hpp"
#include "obstacle/linsys.hpp"
#include "obstacle/parallel.hpp"

namespace fs = std::filesystem;
using namespace obstacle;

namespace {

struct Options {
  std::string example;
  std::string mode = "uniform";
  int levels = 6;
  double theta = 0.5;
  double eps = 1e-10;
  double c = 1.0;
  int quad_order = 0;
  long max_elements = 0;
  long max_dofs = 0;
  int initial_refinements = -1;
  int dual_levels = 0;
  int threads = 0;
  bool dump_meshes = false;
  bool verbose = false;
  std::string out = ".";
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void write_table(const fs::path& file, const std::vector<std::string>& cols,
                 const std::vector<ConvergenceRecord>& recs, bool errors) {
  std::ofstream os(file);
  os << "# level nelems dofs";
  for (const auto& c : cols) os << ' ' << c;
  os << '\n';
  for (const auto& r : recs) {
    os << r.level << ' ' << r.nelems << ' ' << r.dofs;
    for (const auto& c : cols) {
      if (c == "pdas_iters") {
        os << ' ' << r.pdas_iters;
        continue;
      }
      const auto& map = errors ? r.errors : r.estimators;
      const auto it = map.find(c);
      os << ' ' << (it == map.end() ? std::string("nan") : fmt(it->second));
    }
    os << '\n';
  }
}

int run(ProblemKind kind, const Options& o) {
  auto& reg = ExampleRegistry::instance();
  if (!reg.contains(o.example)) {
    std::cerr << "unknown example '" << o.example << "'; known:";
    for (const auto& id : reg.ids()) std::cerr << ' ' << id;
    std::cerr << '\n';
    return 2;
  }
  const Example& ex = reg.find(o.example);
  if (ex.kind != kind) {
    std::cerr << "example '" << o.example << "' belongs to the other subcommand\n";
    return 2;
  }
  if (o.threads > 0) set_worker_count(o.threads);

  LoopConfig cfg;
  cfg.mode = o.mode == "adaptive" ? RefineMode::adaptive : RefineMode::uniform;
  cfg.theta = o.theta;
  cfg.max_levels = o.levels;
  cfg.max_elements = o.max_elements;
  cfg.max_dofs = o.max_dofs;
  cfg.eps = o.eps;
  cfg.pdas.c = o.c;
  if (o.verbose) cfg.pdas.log = &std::cerr;
  cfg.quad_order = o.quad_order;
  cfg.dual_ref_levels = o.dual_levels;
  cfg.initial_refinements = o.initial_refinements;

  const fs::path out(o.out);
  fs::create_directories(out);
  auto dump = [&](const LevelData& d) {
    if (o.verbose)
      std::cerr << "level " << d.level << ": " << d.mesh->num_triangles() << " elements\n";
    if (!o.dump_meshes) return;
    char name[32];
    std::snprintf(name, sizeof name, "mesh_%03d.txt", d.level);
    std::ofstream ms(out / name);
    d.mesh->dump(ms);
    std::snprintf(name, sizeof name, "solution_%03d.dat", d.level);
    std::ofstream ss(out / name);
    ss << std::setprecision(17);
    if (d.membrane) {
      ss << "# triangle u_h lambda_h\n";
      for (int t = 0; t < d.mesh->num_triangles(); ++t)
        ss << t << ' ' << d.membrane->u.c[t] << ' ' << d.membrane->lambda.c[t] << '\n';
    } else if (d.plate) {
      ss << "# triangle u_h(v0) u_h(v1) u_h(v2) lambda_h(v0) lambda_h(v1) lambda_h(v2)\n";
      for (int t = 0; t < d.mesh->num_triangles(); ++t) {
        ss << t;
        for (int k = 0; k < 3; ++k) ss << ' ' << d.plate->u.c[3 * t + k];
        for (int k = 0; k < 3; ++k) ss << ' ' << d.plate->lambda.c[3 * t + k];
        ss << '\n';
      }
    }
  };

  const LoopResult res = adaptive_loop(ex, cfg, dump);

  std::vector<std::string> ecols, scols;
  if (kind == ProblemKind::membrane) {
    ecols = {"error_u", "error_sigma", "error_J"};
    scols = {"est_r", "est_p", "est_c", "osc", "est_total", "u_Ju", "pdas_iters"};
  } else {
    ecols = {"error_u", "error_M"};
    scols = {"est_r", "est_pxi", "est_c", "osc", "est_total", "xi_inf", "lambda_h_omega",
             "est_r_osc", "est_c_p", "est_inf", "pdas_iters"};
  }
  if (o.dual_levels > 0) ecols.push_back("error_lambda");
  if (!ex.u_exact) ecols.clear();
  write_table(out / "errors.dat", ecols, res.records, true);
  write_table(out / "estimators.dat", scols, res.records, false);

  nlohmann::ordered_json meta;
  meta["problem"] = kind == ProblemKind::membrane ? "membrane" : "plate";
  meta["example"] = ex.id;
  meta["description"] = ex.description;
  meta["domain"] = to_string(ex.domain);
  meta["mode"] = o.mode;
  meta["levels"] = o.levels;
  meta["theta"] = o.theta;
  meta["eps"] = o.eps;
  meta["pdas_c"] = o.c;
  meta["quad_order"] = o.quad_order;
  meta["max_elements"] = o.max_elements;
  meta["max_dofs"] = o.max_dofs;
  meta["initial_refinements"] =
      o.initial_refinements >= 0 ? o.initial_refinements : ex.initial_refinements;
  meta["linear_solver"] = LUSolver().backend();
  meta["levels_completed"] = res.records.size();
  meta["status"] = res.ok() ? "ok" : "failed";
  if (!res.ok()) meta["error"] = res.error;
  std::ofstream(out / "run.json") << meta.dump(2) << '\n';

  for (const auto& r : res.records) {
    std::cout << "level " << r.level << "  #T " << r.nelems << "  dofs " << r.dofs
              << "  est " << fmt(r.estimators.at("est_total"));
    for (const auto& [k, v] : r.errors) std::cout << "  " << k << ' ' << v;
    std::cout << "  pdas " << r.pdas_iters << '\n';
  }
  if (!res.ok()) {
    std::cerr << "solver failure: " << res.error << '\n';
    return 1;
  }
  return 0;
}

void add_options(CLI::App* app, Options& o) {
  app->add_option("--example", o.example, "example id or alias")->required();
  app->add_option("--mode", o.mode, "uniform | adaptive")
      ->check(CLI::IsMember({"uniform", "adaptive"}));
  app->add_option("--levels", o.levels, "number of levels")->check(CLI::PositiveNumber);
  app->add_option("--theta", o.theta, "bulk parameter")->check(CLI::Range(1e-12, 1.0));
  app->add_option("--eps", o.eps, "width of the regularized maximum")->check(CLI::PositiveNumber);
  app->add_option("--c", o.c, "active-set scaling")->check(CLI::PositiveNumber);
  app->add_option("--quad-order", o.quad_order, "quadrature order override (0: automatic)");
  app->add_option("--max-elements", o.max_elements, "stop beyond this many elements");
  app->add_option("--max-dofs", o.max_dofs, "stop beyond this many unknowns");
  app->add_option("--initial-refinements", o.initial_refinements, "override the initial mesh");
  app->add_option("--dual-levels", o.dual_levels, "also report the dual-norm multiplier error");
  app->add_option("--threads", o.threads, "worker threads (default: OBSTACLE_MFEM_THREADS)");
  app->add_flag("--dump-meshes", o.dump_meshes, "write meshes and solutions per level");
  app->add_flag("-v,--verbose", o.verbose, "trace progress to stderr");
  app->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed FEM for membrane and plate obstacle problems"};
  app.require_subcommand(1);
  Options mo, po;
  auto* mem = app.add_subcommand("membrane", "membrane obstacle problem (RT0 x P0 x P0)");
  add_options(mem, mo);
  auto* pl = app.add_subcommand("plate", "plate obstacle problem (divDiv-conforming moments)");
  add_options(pl, po);
  auto* ls = app.add_subcommand("list", "list registered examples");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*ls) {
      for (const auto& id : ExampleRegistry::instance().ids()) {
        const Example& ex = ExampleRegistry::instance().find(id);
        std::cout << id << "  [" << (ex.kind == ProblemKind::membrane ? "membrane" : "plate")
                  << ", " << to_string(ex.domain) << "]  " << ex.description << '\n';
      }
      return 0;
    }
    return *mem ? run(ProblemKind::membrane, mo) : run(ProblemKind::plate, po);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
