#include "obstacle/linsys.hpp"

#include <Eigen/SparseLU>
#include <ostream>

#ifdef OBSTACLE_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace obstacle {

int SaddleSystem::add_block(std::string name, int size) {
  const int off = dim();
  names_.push_back(std::move(name));
  sizes_.push_back(size);
  offsets_.push_back(off);
  return static_cast<int>(names_.size()) - 1;
}

int SaddleSystem::block_of(int row) const {
  for (int b = static_cast<int>(offsets_.size()) - 1; b >= 0; --b)
    if (row >= offsets_[b]) return b;
  return -1;
}

SparseMatrix SaddleSystem::matrix() const {
  SparseMatrix A(dim(), dim());
  A.setFromTriplets(trip_.begin(), trip_.end());
  A.makeCompressed();
  return A;
}

struct LUSolver::Impl {
#ifdef OBSTACLE_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
};

LUSolver::LUSolver() : impl_(std::make_unique<Impl>()) {}
LUSolver::~LUSolver() = default;
LUSolver::LUSolver(LUSolver&&) noexcept = default;
LUSolver& LUSolver::operator=(LUSolver&&) noexcept = default;

const char* LUSolver::backend() {
#ifdef OBSTACLE_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu-colamd";
#endif
}

void LUSolver::analyze(const SparseMatrix& A) { impl_->lu.analyzePattern(A); }

void LUSolver::factorize(const SparseMatrix& A) {
  impl_->lu.factorize(A);
  if (impl_->lu.info() != Eigen::Success) throw SingularSystem("sparse LU factorization failed");
}

Vector LUSolver::solve(const Vector& b) const {
  Vector x = impl_->lu.solve(b);
  if (!x.allFinite()) throw SingularSystem("sparse LU produced non-finite values");
  return x;
}

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b) {
  const double nb = b.norm();
  const double r = (A * x - b).norm();
  return nb > 0 ? r / nb : r;
}

Vector certified_solve(const LUSolver& lu, const SparseMatrix& A, const Vector& rhs, double tol) {
  if (rhs.norm() == 0) return Vector::Zero(rhs.size());
  Vector x = lu.solve(rhs);
  for (int it = 0; it < 3 && relative_residual(A, x, rhs) > tol; ++it) x += lu.solve(rhs - A * x);
  const double r = relative_residual(A, x, rhs);
  if (r <= tol) return x;
  // Refinement stagnated. Accept only at the rounding floor of storing x in
  // double: normwise backward error ||Ax - b|| / (|| |A||x| || + ||b||).
  const double omega = backward_error(A, x, rhs);
  if (omega <= kBackwardErrorFloor) return x;
  char buf[96];
  std::snprintf(buf, sizeof buf, "residual %.3e above tolerance %.1e (backward error %.3e)", r, tol,
                omega);
  throw SingularSystem(buf);
}

double backward_error(const SparseMatrix& A, const Vector& x, const Vector& b) {
  const Vector ax = A.cwiseAbs() * x.cwiseAbs();
  const double d = ax.norm() + b.norm();
  return d > 0 ? (A * x - b).norm() / d : 0.0;
}

Vector factor_solve(const SparseMatrix& A, const Vector& rhs, double tol) {
  if (A.rows() != A.cols() || A.rows() != rhs.size()) throw Error("factor_solve: size mismatch");
  LUSolver lu;
  lu.analyze(A);
  lu.factorize(A);
  return certified_solve(lu, A, rhs, tol);
}

Vector factor_solve(const SaddleSystem& S, const Vector& rhs, double tol) {
  const SparseMatrix A = S.matrix();
  try {
    return factor_solve(A, rhs, tol);
  } catch (const SingularSystem& e) {
    // name the block of the first structurally empty row or column
    Vector rown = Vector::Zero(A.rows()), coln = Vector::Zero(A.cols());
    for (int k = 0; k < A.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
        rown[it.row()] += std::abs(it.value());
        coln[it.col()] += std::abs(it.value());
      }
    std::string blk = "unknown";
    for (int i = 0; i < A.rows(); ++i)
      if (rown[i] == 0 || coln[i] == 0) {
        blk = S.name(S.block_of(i));
        break;
      }
    throw SingularSystem(std::string(e.what()) + " (block " + blk + ")", blk);
  }
}

void write_matrix_market(std::ostream& os, const SparseMatrix& A) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  os.precision(17);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace obstacle
