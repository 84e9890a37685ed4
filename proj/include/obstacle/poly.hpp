#pragma once

#include "obstacle/types.hpp"

namespace obstacle {

// Bivariate polynomial of total degree <= 3: sum c[i][j] x^i y^j.
struct Poly2 {
  static constexpr int N = 4;
  std::array<std::array<double, N>, N> c{};

  static Poly2 monomial(int i, int j, double a = 1.0);
  static Poly2 constant(double a) { return monomial(0, 0, a); }

  double operator()(double x, double y) const;
  double operator()(const Vec2& p) const { return (*this)(p.x(), p.y()); }
  Poly2 dx() const;
  Poly2 dy() const;
  int degree() const;

  Poly2& operator+=(const Poly2& o);
  Poly2& operator*=(double a);
  friend Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
  friend Poly2 operator*(double a, Poly2 p) { return p *= a; }
  // throws if the product exceeds degree 3
  friend Poly2 operator*(const Poly2& a, const Poly2& b);
};

// Index of x^i y^j in the 10 monomials of degree <= 3, graded order.
int monomial_index(int i, int j);
// Exponents of the k-th monomial.
std::array<int, 2> monomial_exponents(int k);

}  // namespace obstacle
