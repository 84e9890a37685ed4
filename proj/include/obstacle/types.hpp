#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace obstacle {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by factorizations; `block` names the offending part of the system.
struct SingularSystem : Error {
  std::string block;
  SingularSystem(const std::string& what, std::string blk = {})
      : Error(what), block(std::move(blk)) {}
};

struct NoConvergence : Error {
  using Error::Error;
};

}  // namespace obstacle
