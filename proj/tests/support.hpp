#pragma once

// Small helpers shared by the test binaries.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "obstacle/mesh.hpp"

namespace testing_support {

using obstacle::Vec2;

// Least-squares slope of -log(err) against log(n) over the last `k` points.
inline double eoc(const std::vector<double>& n, const std::vector<double>& err, int k) {
  const int m = static_cast<int>(n.size());
  if (k > m) k = m;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = m - k; i < m; ++i) {
    const double x = std::log(n[i]), y = -std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

// n! as a double
inline double fact(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// int over the reference triangle of x^a y^b
inline double ref_monomial(int a, int b) { return fact(a) * fact(b) / fact(a + b + 2); }

// uniform point inside triangle (a, b, c)
inline Vec2 random_point(std::mt19937& rng, const std::array<Vec2, 3>& c) {
  std::uniform_real_distribution<double> U(0, 1);
  double s = U(rng), t = U(rng);
  if (s + t > 1) {
    s = 1 - s;
    t = 1 - t;
  }
  return c[0] + s * (c[1] - c[0]) + t * (c[2] - c[0]);
}

// point with barycentric coordinates bounded away from the boundary
inline std::array<double, 3> random_bary(std::mt19937& rng, double margin = 0.05) {
  std::uniform_real_distribution<double> U(margin, 1);
  double a = U(rng), b = U(rng), c = U(rng);
  const double s = a + b + c;
  return {a / s, b / s, c / s};
}

}  // namespace testing_support
