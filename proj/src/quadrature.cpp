#include "obstacle/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace obstacle {

namespace {

LineQuad gauss_legendre(int n) {
  LineQuad q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
    }
    q.x[n - 1 - i] = 0.5 * (x + 1);
    q.w[n - 1 - i] = 1.0 / ((1 - x * x) * dp * dp);
  }
  return q;
}

void add_orbit3(TriQuad& q, double a, double w) {
  const double b = 1 - 2 * a;
  q.bary.push_back({a, a, b});
  q.bary.push_back({a, b, a});
  q.bary.push_back({b, a, a});
  for (int i = 0; i < 3; ++i) q.w.push_back(w);
}

void add_orbit6(TriQuad& q, double a, double b, double w) {
  const double c = 1 - a - b;
  const double p[6][3] = {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}};
  for (const auto& r : p) {
    q.bary.push_back({r[0], r[1], r[2]});
    q.w.push_back(w);
  }
}

TriQuad collapsed(int order) {
  const int n = (order + 3) / 2;
  const LineQuad g = gauss_legendre(n);
  TriQuad q;
  q.order = order;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double a = g.x[i], b = g.x[j];
      const double l1 = a, l2 = (1 - a) * b;
      q.bary.push_back({1 - l1 - l2, l1, l2});
      q.w.push_back(2 * g.w[i] * g.w[j] * (1 - a));
    }
  return q;
}

TriQuad make_tri(int order) {
  TriQuad q;
  q.order = order;
  if (order <= 1) {
    q.order = 1;
    q.bary.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
    q.w.push_back(1.0);
  } else if (order == 2) {
    add_orbit3(q, 1.0 / 6, 1.0 / 3);
  } else if (order == 6) {
    add_orbit3(q, 0.249286745170910, 0.116786275726379);
    add_orbit3(q, 0.063089014491502, 0.050844906370207);
    add_orbit6(q, 0.310352451033784, 0.053145049844817, 0.082851075618374);
  } else if (order == 8) {
    q.bary.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
    q.w.push_back(0.144315607677787);
    add_orbit3(q, 0.459292588292723, 0.095091634267285);
    add_orbit3(q, 0.170569307751760, 0.103217370534718);
    add_orbit3(q, 0.050547228317031, 0.032458497623198);
    add_orbit6(q, 0.263112829634638, 0.008394777409958, 0.027230314174435);
  } else {
    return collapsed(order);
  }
  return q;
}

}  // namespace

const TriQuad& tri_rule(int order) {
  static std::mutex mu;
  static std::map<int, TriQuad> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_tri(order)).first;
  return it->second;
}

const LineQuad& line_rule(int order) {
  static std::mutex mu;
  static std::map<int, LineQuad> cache;
  const int n = std::max(1, (order + 2) / 2);
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

}  // namespace obstacle
