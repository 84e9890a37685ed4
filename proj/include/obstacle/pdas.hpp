#pragma once

#include <iosfwd>

#include "obstacle/linsys.hpp"

namespace obstacle {

// Pair i couples the multiplier unknown `lambda` with the affine residual
// r_i(x) = row . x - offset. When active, row `slot` of the system becomes
// r_i(x) = 0; when inactive it becomes x[lambda] = 0.
struct ComplementarityPair {
  int lambda = -1;
  int slot = -1;
  std::vector<std::pair<int, double>> row;
  double offset = 0;
  double scale = 1;  // integral of the pair's basis function
  int triangle = -1;
  int local = 0;
};

struct ComplementaritySystem {
  SparseMatrix K;  // equality part; slot rows are empty
  Vector rhs;
  std::vector<ComplementarityPair> pairs;

  int dim() const { return static_cast<int>(K.rows()); }
  int num_pairs() const { return static_cast<int>(pairs.size()); }
  double residual(int i, const Vector& x) const;
  // the full square matrix and rhs for a fixed active set
  SparseMatrix matrix_for(const std::vector<char>& active) const;
  Vector rhs_for(const std::vector<char>& active) const;
};

struct PdasConfig {
  double c = 1.0;
  int max_iterations = 1000;
  double tol = 1e-10;
  // On a repeated active set continue with single least-index pivots (finite
  // when the reduced multiplier system is symmetric positive definite)
  // instead of failing.
  bool pivot_on_cycle = true;
  std::ostream* log = nullptr;  // iteration trace when set
};

struct PdasResult {
  Vector x;
  std::vector<char> active;
  int iterations = 0;
  std::vector<int> active_sizes;  // |A_k| per iterate
};

PdasResult solve_pdas(const ComplementaritySystem& sys, const PdasConfig& cfg);

}  // namespace obstacle
