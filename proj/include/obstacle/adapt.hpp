#pragma once

#include <functional>
#include <map>
#include <string>

#include "obstacle/estimate.hpp"
#include "obstacle/examples.hpp"

namespace obstacle {

// Minimal greedy prefix (by indicator desc, index asc) with
// sum >= theta * total. `indicators` are squared values.
std::vector<int> mark_bulk(const Vector& indicators, double theta);

enum class RefineMode { uniform, adaptive };

struct LoopConfig {
  RefineMode mode = RefineMode::uniform;
  double theta = 0.5;
  int max_levels = 6;
  long max_elements = 0;  // 0: no limit
  long max_dofs = 0;      // 0: no limit
  double eps = 1e-10;
  PdasConfig pdas;
  int quad_order = 0;
  int dual_ref_levels = 0;  // > 0 also reports the dual-norm multiplier error
  int initial_refinements = -1;  // < 0: the example's default
};

struct ConvergenceRecord {
  int level = 0;
  long nelems = 0;
  long dofs = 0;
  int pdas_iters = 0;
  std::map<std::string, double> errors;     // only with an exact solution
  std::map<std::string, double> estimators;
};

struct LevelData {
  int level = 0;
  const Mesh* mesh = nullptr;
  const MembraneSolution* membrane = nullptr;
  const PlateSolution* plate = nullptr;
  const EstimatorReport* report = nullptr;
};

struct LoopResult {
  std::vector<ConvergenceRecord> records;
  std::string error;  // empty on success; records stay valid otherwise
  bool ok() const { return error.empty(); }
};

LoopResult adaptive_loop(const Example& ex, const LoopConfig& cfg,
                         const std::function<void(const LevelData&)>& on_level = {});

}  // namespace obstacle
