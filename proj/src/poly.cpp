#include "obstacle/poly.hpp"

namespace obstacle {

Poly2 Poly2::monomial(int i, int j, double a) {
  Poly2 p;
  p.c[i][j] = a;
  return p;
}

double Poly2::operator()(double x, double y) const {
  // Horner in x of polynomials in y
  double r = 0;
  for (int i = N - 1; i >= 0; --i) {
    double s = 0;
    for (int j = N - 1 - i; j >= 0; --j) s = s * y + c[i][j];
    r = r * x + s;
  }
  return r;
}

Poly2 Poly2::dx() const {
  Poly2 p;
  for (int i = 1; i < N; ++i)
    for (int j = 0; j < N; ++j) p.c[i - 1][j] = i * c[i][j];
  return p;
}

Poly2 Poly2::dy() const {
  Poly2 p;
  for (int i = 0; i < N; ++i)
    for (int j = 1; j < N; ++j) p.c[i][j - 1] = j * c[i][j];
  return p;
}

int Poly2::degree() const {
  int d = -1;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (c[i][j] != 0.0 && i + j > d) d = i + j;
  return d;
}

Poly2& Poly2::operator+=(const Poly2& o) {
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) c[i][j] += o.c[i][j];
  return *this;
}

Poly2& Poly2::operator*=(double a) {
  for (auto& row : c)
    for (double& v : row) v *= a;
  return *this;
}

Poly2 operator*(const Poly2& a, const Poly2& b) {
  Poly2 p;
  for (int i = 0; i < Poly2::N; ++i)
    for (int j = 0; j < Poly2::N; ++j) {
      if (a.c[i][j] == 0.0) continue;
      for (int k = 0; k < Poly2::N; ++k)
        for (int l = 0; l < Poly2::N; ++l) {
          if (b.c[k][l] == 0.0) continue;
          if (i + j + k + l >= Poly2::N) throw Error("Poly2 product exceeds degree 3");
          p.c[i + k][j + l] += a.c[i][j] * b.c[k][l];
        }
    }
  return p;
}

int monomial_index(int i, int j) {
  const int d = i + j;
  return d * (d + 1) / 2 + j;
}

std::array<int, 2> monomial_exponents(int k) {
  int d = 0;
  while ((d + 1) * (d + 2) / 2 <= k) ++d;
  const int j = k - d * (d + 1) / 2;
  return {d - j, j};
}

}  // namespace obstacle
