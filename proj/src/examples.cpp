#include "obstacle/examples.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace obstacle {

std::array<double, 4> membrane_blend_coefficients() {
  Eigen::Matrix4d A;
  Eigen::Vector4d b;
  const double h = 0.5;
  A << 1, h, h * h, h * h * h,  //
      0, 1, 2 * h, 3 * h * h,   //
      1, 1, 1, 1,               //
      0, 1, 2, 3;
  b << 0.25, 0, 0, 0;
  const Eigen::Vector4d a = A.fullPivLu().solve(b);
  return {a[0], a[1], a[2], a[3]};
}

Example membrane_smooth_example() {
  Example e;
  e.id = "smooth-square";
  e.aliases = {"membrane_smooth"};
  e.kind = ProblemKind::membrane;
  e.domain = Domain::unit_square;
  e.initial_refinements = 1;
  e.description = "membrane, u = x(1-x)y(1-y), contact on x < 1/2";
  auto half = [](const Vec2& p) { return p.x() - 0.5; };

  ScalarData u;
  u.value = [](const Vec2& p) { return p.x() * (1 - p.x()) * p.y() * (1 - p.y()); };
  u.grad = [](const Vec2& p) {
    return Vec2((1 - 2 * p.x()) * p.y() * (1 - p.y()), p.x() * (1 - p.x()) * (1 - 2 * p.y()));
  };
  u.hess = [](const Vec2& p) {
    Mat2 H;
    const double xy = (1 - 2 * p.x()) * (1 - 2 * p.y());
    H << -2 * p.y() * (1 - p.y()), xy, xy, -2 * p.x() * (1 - p.x());
    return H;
  };
  e.u_exact = u;

  // -Laplace u = 2y(1-y) + 2x(1-x)
  auto mlap = [](const Vec2& p) { return 2 * p.y() * (1 - p.y()) + 2 * p.x() * (1 - p.x()); };
  ScalarData f;
  f.value = [mlap](const Vec2& p) { return p.x() < 0.5 ? 0.0 : mlap(p); };
  f.grad = [](const Vec2& p) {
    return p.x() < 0.5 ? Vec2(0, 0) : Vec2(2 * (1 - 2 * p.x()), 2 * (1 - 2 * p.y()));
  };
  f.hess = [](const Vec2& p) {
    return p.x() < 0.5 ? Mat2::Zero().eval() : (-4.0 * Mat2::Identity()).eval();
  };
  f.interfaces = {half};
  e.f = f;

  const auto a = membrane_blend_coefficients();
  auto gt = [a](double x) { return a[0] + x * (a[1] + x * (a[2] + x * a[3])); };
  auto dgt = [a](double x) { return a[1] + x * (2 * a[2] + 3 * x * a[3]); };
  auto d2gt = [a](double x) { return 2 * a[2] + 6 * x * a[3]; };
  ScalarData g;
  g.value = [u, gt](const Vec2& p) {
    return p.x() < 0.5 ? u.value(p) : gt(p.x()) * p.y() * (1 - p.y());
  };
  g.grad = [u, gt, dgt](const Vec2& p) {
    if (p.x() < 0.5) return u.grad(p);
    return Vec2(dgt(p.x()) * p.y() * (1 - p.y()), gt(p.x()) * (1 - 2 * p.y()));
  };
  g.hess = [u, gt, dgt, d2gt](const Vec2& p) {
    if (p.x() < 0.5) return u.hess(p);
    Mat2 H;
    const double xy = dgt(p.x()) * (1 - 2 * p.y());
    H << d2gt(p.x()) * p.y() * (1 - p.y()), xy, xy, -2 * gt(p.x());
    return H;
  };
  g.interfaces = {half};
  e.g = g;

  ScalarData lam;
  lam.value = [mlap](const Vec2& p) { return p.x() < 0.5 ? mlap(p) : 0.0; };
  lam.grad = [](const Vec2& p) {
    return p.x() < 0.5 ? Vec2(2 * (1 - 2 * p.x()), 2 * (1 - 2 * p.y())) : Vec2(0, 0);
  };
  lam.hess = [](const Vec2& p) {
    return p.x() < 0.5 ? (-4.0 * Mat2::Identity()).eval() : Mat2::Zero().eval();
  };
  lam.interfaces = {half};
  e.lambda_exact = lam;
  return e;
}

Example membrane_pyramid_example() {
  Example e;
  e.id = "lshape-pyramid";
  e.aliases = {"membrane_lshape"};
  e.kind = ProblemKind::membrane;
  e.domain = Domain::lshape_paper;
  e.initial_refinements = 1;
  e.description = "membrane on the L-shape, f = 1, pyramid obstacle on (0,1)^2";
  e.f = ScalarData::constant(1.0);
  auto inside = [](const Vec2& p) { return p.x() > 0 && p.x() < 1 && p.y() > 0 && p.y() < 1; };
  auto dist = [](const Vec2& p) { return std::min({p.x(), 1 - p.x(), p.y(), 1 - p.y()}); };
  ScalarData g;
  g.value = [=](const Vec2& p) { return inside(p) ? std::max(0.0, dist(p) - 0.25) : 0.0; };
  g.grad = [=](const Vec2& p) {
    if (!inside(p) || dist(p) <= 0.25) return Vec2(0, 0);
    const double d[4] = {p.x(), 1 - p.x(), p.y(), 1 - p.y()};
    const Vec2 gr[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    return gr[std::min_element(d, d + 4) - d];
  };
  g.hess = [](const Vec2&) { return Mat2::Zero().eval(); };
  g.interfaces = {[=](const Vec2& p) { return dist(p) - 0.25; },
                  [](const Vec2& p) { return p.x() - p.y(); },
                  [](const Vec2& p) { return p.x() + p.y() - 1; }};
  e.g = g;
  return e;
}

Example plate_smooth_example() {
  Example e;
  e.id = "plate_smooth";
  e.aliases = {"smooth"};
  e.kind = ProblemKind::plate;
  e.domain = Domain::square_m1_1;
  e.initial_refinements = 1;
  e.description = "plate, u = (1 - r^2)^4, contact on r < 1/4";
  auto rin = [](const Vec2& p) { return p.norm() - 0.25; };
  auto rout = [](const Vec2& p) { return p.norm() - 1.0; };

  ScalarData u;
  u.value = [](const Vec2& p) {
    const double s = p.squaredNorm();
    return s < 1 ? std::pow(1 - s, 4) : 0.0;
  };
  u.grad = [](const Vec2& p) {
    const double s = p.squaredNorm();
    return s < 1 ? (-8 * std::pow(1 - s, 3) * p).eval() : Vec2(0, 0);
  };
  u.hess = [](const Vec2& p) {
    const double s = p.squaredNorm();
    if (s >= 1) return Mat2::Zero().eval();
    return (48 * std::pow(1 - s, 2) * p * p.transpose() - 8 * std::pow(1 - s, 3) * Mat2::Identity()).eval();
  };
  u.interfaces = {rout};
  e.u_exact = u;

  // biharmonic of u inside the unit disk: 384 (6 r^4 - 6 r^2 + 1)
  auto bih = [](const Vec2& p) {
    const double s = p.squaredNorm();
    return s < 1 ? 384 * (6 * s * s - 6 * s + 1) : 0.0;
  };
  ScalarData f;
  f.value = [bih](const Vec2& p) { return bih(p) - (p.squaredNorm() < 1.0 / 16 ? 100.0 : 0.0); };
  f.grad = [](const Vec2& p) {
    const double s = p.squaredNorm();
    return s < 1 ? (384 * (24 * s - 12) * p).eval() : Vec2(0, 0);
  };
  f.hess = [](const Vec2& p) {
    const double s = p.squaredNorm();
    if (s >= 1) return Mat2::Zero().eval();
    return (384 * ((24 * s - 12) * Mat2::Identity() + 48 * p * p.transpose())).eval();
  };
  f.interfaces = {rin, rout};
  e.f = f;

  const double A = 100697.0 / 36864, B = 20803.0 / 73728, C = 74741.0 / 73728;
  ScalarData g;
  g.value = [=](const Vec2& p) {
    const double s = p.squaredNorm();
    return s < 1.0 / 16 ? std::pow(1 - s, 4) : -A * s - B * std::sqrt(s) + C;
  };
  g.grad = [=](const Vec2& p) {
    const double s = p.squaredNorm();
    if (s < 1.0 / 16) return (-8 * std::pow(1 - s, 3) * p).eval();
    return (-(2 * A + B / std::sqrt(s)) * p).eval();
  };
  g.hess = [=](const Vec2& p) {
    const double s = p.squaredNorm();
    if (s < 1.0 / 16)
      return (48 * std::pow(1 - s, 2) * p * p.transpose() - 8 * std::pow(1 - s, 3) * Mat2::Identity()).eval();
    const double r = std::sqrt(s);
    return (-2 * A * Mat2::Identity() - B * (Mat2::Identity() / r - p * p.transpose() / (r * s))).eval();
  };
  g.interfaces = {rin};
  e.g = g;

  ScalarData lam;
  lam.value = [](const Vec2& p) { return p.squaredNorm() < 1.0 / 16 ? 100.0 : 0.0; };
  lam.grad = [](const Vec2&) { return Vec2(0, 0); };
  lam.hess = [](const Vec2&) { return Mat2::Zero().eval(); };
  lam.interfaces = {rin};
  e.lambda_exact = lam;
  return e;
}

Example plate_ellipse_example() {
  Example e;
  e.id = "plate_ellipse_lshape";
  e.aliases = {"ellipse-lshape"};
  e.kind = ProblemKind::plate;
  e.domain = Domain::lshape_small;
  e.initial_refinements = 1;
  e.description = "plate on the small L-shape, f = 0, elliptic paraboloid obstacle";
  e.f = ScalarData::constant(0.0);
  const double ax = 0.2 * 0.2, ay = 0.35 * 0.35;
  ScalarData g;
  g.value = [=](const Vec2& p) {
    return 1 - ((p.x() + 0.25) * (p.x() + 0.25) / ax + p.y() * p.y() / ay);
  };
  g.grad = [=](const Vec2& p) { return Vec2(-2 * (p.x() + 0.25) / ax, -2 * p.y() / ay); };
  g.hess = [=](const Vec2&) {
    Mat2 H;
    H << -2 / ax, 0, 0, -2 / ay;
    return H;
  };
  e.g = g;
  return e;
}

Example plate_nonsmooth_example() {
  Example e;
  e.id = "plate_nonsmooth_lshape";
  e.aliases = {"nonsmooth-lshape"};
  e.kind = ProblemKind::plate;
  e.domain = Domain::lshape_paper;
  e.initial_refinements = 1;
  e.description = "plate on the L-shape, f = 0, obstacle 1/4 - |x - (1/2,1/2)|^(3/2)";
  e.f = ScalarData::constant(0.0);
  const Vec2 z(0.5, 0.5);
  ScalarData g;
  g.value = [z](const Vec2& p) { return 0.25 - std::pow((p - z).squaredNorm(), 0.75); };
  g.grad = [z](const Vec2& p) {
    const Vec2 d = p - z;
    const double s = d.squaredNorm();
    return s > 0 ? (-1.5 * std::pow(s, -0.25) * d).eval() : Vec2(0, 0);
  };
  g.hess = [z](const Vec2& p) {
    const Vec2 d = p - z;
    const double s = std::max(d.squaredNorm(), 1e-300);
    return (-1.5 * (std::pow(s, -0.25) * Mat2::Identity() - 0.5 * std::pow(s, -1.25) * d * d.transpose()))
        .eval();
  };
  g.singular_points = {z};
  e.g = g;
  return e;
}

ExampleRegistry::ExampleRegistry() {
  add(membrane_smooth_example());
  add(membrane_pyramid_example());
  add(plate_smooth_example());
  add(plate_ellipse_example());
  add(plate_nonsmooth_example());
}

ExampleRegistry& ExampleRegistry::instance() {
  static ExampleRegistry r;
  return r;
}

void ExampleRegistry::add(Example e) {
  for (const auto& a : e.aliases) alias_[a] = e.id;
  const std::string id = e.id;
  by_id_[id] = std::move(e);
}

bool ExampleRegistry::contains(const std::string& name) const {
  return by_id_.count(name) || alias_.count(name);
}

const Example& ExampleRegistry::find(const std::string& name) const {
  auto it = by_id_.find(name);
  if (it != by_id_.end()) return it->second;
  auto a = alias_.find(name);
  if (a != alias_.end()) return by_id_.at(a->second);
  throw Error("unknown example '" + name + "'");
}

std::vector<std::string> ExampleRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : by_id_) out.push_back(k);
  return out;
}

}  // namespace obstacle
