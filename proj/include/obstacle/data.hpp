#pragma once

#include <functional>

#include "obstacle/types.hpp"

namespace obstacle {

// A function with value, gradient and Hessian callbacks. `interfaces` are
// signed level functions whose zero sets are the kinks of a piecewise-smooth
// function; elements crossing one get the higher quadrature order.
struct ScalarData {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> grad;
  std::function<Mat2(const Vec2&)> hess;
  std::vector<std::function<double(const Vec2&)>> interfaces;
  // points where derivatives blow up; elements containing one are flagged too
  std::vector<Vec2> singular_points;

  double operator()(const Vec2& p) const { return value(p); }
  bool crosses_interface(const std::array<Vec2, 3>& tri) const;

  static ScalarData constant(double c);
  // affine a + b.x
  static ScalarData affine(double a, const Vec2& b);
  ScalarData scaled(double s) const;
};

using VectorFn = std::function<Vec2(const Vec2&)>;

// Max relative mismatch of grad/hess against central differences at `n`
// pseudo-random points of the box [lo, hi]^2.
double check_derivatives(const ScalarData& f, const Vec2& lo, const Vec2& hi, int n,
                         unsigned seed = 1);

}  // namespace obstacle
