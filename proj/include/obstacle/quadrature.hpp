#pragma once

#include "obstacle/types.hpp"

namespace obstacle {

// Rule on a triangle in barycentric coordinates; weights sum to 1 and are
// scaled by |T| at the call site.
struct TriQuad {
  int order = 0;
  std::vector<std::array<double, 3>> bary;
  std::vector<double> w;
  int size() const { return static_cast<int>(w.size()); }
};

// Gauss-Legendre on [0, 1].
struct LineQuad {
  std::vector<double> x;
  std::vector<double> w;
  int size() const { return static_cast<int>(w.size()); }
};

// Symmetric rules for orders 1, 2, 6, 8; collapsed Gauss-Legendre beyond.
const TriQuad& tri_rule(int order);
const LineQuad& line_rule(int order);

// order chosen from the data flags: 8 on interface elements, 6 otherwise
inline int data_order(bool crosses_interface) { return crosses_interface ? 8 : 6; }

inline Vec2 bary_point(const std::array<Vec2, 3>& c, const std::array<double, 3>& l) {
  return l[0] * c[0] + l[1] * c[1] + l[2] * c[2];
}

}  // namespace obstacle
