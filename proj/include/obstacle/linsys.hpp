#pragma once

#include <iosfwd>
#include <memory>

#include "obstacle/types.hpp"

namespace obstacle {

// Block-structured coordinate assembly of a saddle-point system.
class SaddleSystem {
 public:
  int add_block(std::string name, int size);
  int offset(int block) const { return offsets_[block]; }
  int size(int block) const { return sizes_[block]; }
  int dim() const { return offsets_.empty() ? 0 : offsets_.back() + sizes_.back(); }
  const std::string& name(int block) const { return names_[block]; }
  int block_of(int row) const;

  void add(int bi, int i, int bj, int j, double v) {
    trip_.emplace_back(offsets_[bi] + i, offsets_[bj] + j, v);
  }
  void add_global(int r, int c, double v) { trip_.emplace_back(r, c, v); }
  void reserve(std::size_t n) { trip_.reserve(n); }
  std::vector<Triplet>& triplets() { return trip_; }

  Vector rhs;  // sized by finalize()
  // Sums duplicates; explicit zeros are kept so patterns stay fixed.
  SparseMatrix matrix() const;
  void finalize() { rhs = Vector::Zero(dim()); }

 private:
  std::vector<std::string> names_;
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  std::vector<Triplet> trip_;
};

// Sparse LU with a reusable symbolic analysis. UMFPACK when built with it,
// Eigen::SparseLU (COLAMD) otherwise.
class LUSolver {
 public:
  LUSolver();
  ~LUSolver();
  LUSolver(LUSolver&&) noexcept;
  LUSolver& operator=(LUSolver&&) noexcept;

  void analyze(const SparseMatrix& A);
  void factorize(const SparseMatrix& A);  // throws SingularSystem
  Vector solve(const Vector& b) const;
  static const char* backend();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b);

// Direct solve with residual certification (one refinement step if needed).
Vector factor_solve(const SparseMatrix& A, const Vector& rhs, double tol = 1e-10);
Vector factor_solve(const SaddleSystem& S, const Vector& rhs, double tol = 1e-10);
// Normwise backward error || Ax - b || / (|| |A||x| || + || b ||).
double backward_error(const SparseMatrix& A, const Vector& x, const Vector& b);
inline constexpr double kBackwardErrorFloor = 1e-14;

// Solve with up to three steps of iterative refinement. Certified when the
// relative residual is <= tol, or, once refinement stagnates, when the
// backward error is at the rounding floor (ill-conditioned fourth-order
// systems on fine meshes); throws SingularSystem otherwise.
Vector certified_solve(const LUSolver& lu, const SparseMatrix& A, const Vector& rhs,
                       double tol = 1e-10);

void write_matrix_market(std::ostream& os, const SparseMatrix& A);

}  // namespace obstacle
