#include "obstacle/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace obstacle {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

}  // namespace

Domain parse_domain(std::string_view name) {
  if (name == "unit_square") return Domain::unit_square;
  if (name == "square_m1_1") return Domain::square_m1_1;
  if (name == "lshape_paper") return Domain::lshape_paper;
  if (name == "lshape_small") return Domain::lshape_small;
  throw Error("unknown domain '" + std::string(name) + "'");
}

std::string to_string(Domain d) {
  switch (d) {
    case Domain::unit_square: return "unit_square";
    case Domain::square_m1_1: return "square_m1_1";
    case Domain::lshape_paper: return "lshape_paper";
    case Domain::lshape_small: return "lshape_small";
  }
  return "?";
}

double domain_area(Domain d) {
  switch (d) {
    case Domain::unit_square: return 1.0;
    case Domain::square_m1_1: return 4.0;
    case Domain::lshape_paper: return 3.0;
    case Domain::lshape_small: return 0.75;
  }
  return 0.0;
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<int> generation, std::vector<int> parent)
    : vertices_(std::move(vertices)),
      tris_(std::move(triangles)),
      generation_(std::move(generation)),
      parent_(std::move(parent)) {
  if (generation_.empty()) generation_.assign(tris_.size(), 0);
  if (parent_.empty()) parent_.assign(tris_.size(), -1);
  build();
}

Mesh Mesh::from_raw(std::vector<Vec2> vertices,
                    std::vector<std::array<int, 3>> triangles) {
  for (auto& t : triangles)
    if (signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0)
      std::swap(t[1], t[2]);
  Mesh tmp(vertices, triangles);
  for (int t = 0; t < tmp.num_triangles(); ++t) {
    // longest edge, ties broken by the smaller global edge index
    int best = 0;
    for (int k = 1; k < 3; ++k) {
      const double lk = tmp.edge_length(tmp.tri_edge(t, k));
      const double lb = tmp.edge_length(tmp.tri_edge(t, best));
      if (lk > lb * (1 + 1e-12) ||
          (std::abs(lk - lb) <= 1e-12 * lb && tmp.tri_edge(t, k) < tmp.tri_edge(t, best)))
        best = k;
    }
    // rotate so that the edge opposite local vertex `best` becomes edge 2
    auto& tri = triangles[t];
    std::array<int, 3> r{tri[(best + 1) % 3], tri[(best + 2) % 3], tri[best]};
    tri = r;
  }
  return Mesh(std::move(vertices), std::move(triangles));
}

void Mesh::build() {
  const int nt = num_triangles();
  area_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tr = tris_[t];
    area_[t] = signed_area(vertices_[tr[0]], vertices_[tr[1]], vertices_[tr[2]]);
  }
  // unique edges, sorted lexicographically
  std::vector<std::array<int, 4>> half;  // lo, hi, triangle, local edge
  half.reserve(3 * nt);
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) {
      int a = tris_[t][(k + 1) % 3], b = tris_[t][(k + 2) % 3];
      if (a > b) std::swap(a, b);
      half.push_back({a, b, t, k});
    }
  std::sort(half.begin(), half.end());
  conn_ = Connectivity{};
  conn_.tri_edges.assign(nt, {-1, -1, -1});
  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && half[j][0] == half[i][0] && half[j][1] == half[i][1]) ++j;
    const int e = static_cast<int>(conn_.edges.size());
    conn_.edges.push_back({half[i][0], half[i][1]});
    std::array<int, 2> et{-1, -1};
    int n = 0;
    for (std::size_t k = i; k < j; ++k) {
      if (n < 2) et[n] = half[k][2];
      ++n;
      conn_.tri_edges[half[k][2]][half[k][3]] = e;
    }
    if (n > 2) throw Error("edge shared by more than two triangles");
    conn_.edge_tris.push_back(et);
    conn_.boundary_edge.push_back(n == 1 ? 1 : 0);
    i = j;
  }
  conn_.boundary_vertex.assign(vertices_.size(), 0);
  for (std::size_t e = 0; e < conn_.edges.size(); ++e)
    if (conn_.boundary_edge[e]) {
      conn_.boundary_vertex[conn_.edges[e][0]] = 1;
      conn_.boundary_vertex[conn_.edges[e][1]] = 1;
    }
  conn_.patch_offsets.assign(vertices_.size() + 1, 0);
  for (const auto& tr : tris_)
    for (int v : tr) ++conn_.patch_offsets[v + 1];
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    conn_.patch_offsets[v + 1] += conn_.patch_offsets[v];
  conn_.patch_tris.resize(conn_.patch_offsets.back());
  std::vector<int> fill(conn_.patch_offsets.begin(), conn_.patch_offsets.end() - 1);
  for (int t = 0; t < nt; ++t)
    for (int v : tris_[t]) conn_.patch_tris[fill[v]++] = t;
}

int Mesh::num_interior_edges() const {
  return static_cast<int>(std::count(conn_.boundary_edge.begin(), conn_.boundary_edge.end(), 0));
}

int Mesh::num_interior_vertices() const {
  return static_cast<int>(
      std::count(conn_.boundary_vertex.begin(), conn_.boundary_vertex.end(), 0));
}

std::span<const int> Mesh::vertex_triangles(int v) const {
  return {conn_.patch_tris.data() + conn_.patch_offsets[v],
          static_cast<std::size_t>(conn_.patch_offsets[v + 1] - conn_.patch_offsets[v])};
}

Patch Mesh::patch(int v) const {
  Patch p;
  p.vertex = v;
  for (int t : vertex_triangles(v)) {
    p.triangles.push_back(t);
    p.centroids.push_back(centroid(t));
    p.areas.push_back(area(t));
  }
  return p;
}

std::array<Vec2, 3> Mesh::corners(int t) const {
  const auto& tr = tris_[t];
  return {vertices_[tr[0]], vertices_[tr[1]], vertices_[tr[2]]};
}

Vec2 Mesh::centroid(int t) const {
  const auto c = corners(t);
  return (c[0] + c[1] + c[2]) / 3.0;
}

double Mesh::diameter(int t) const {
  const auto c = corners(t);
  return std::max({(c[0] - c[1]).norm(), (c[1] - c[2]).norm(), (c[2] - c[0]).norm()});
}

double Mesh::edge_length(int e) const {
  return (vertices_[conn_.edges[e][1]] - vertices_[conn_.edges[e][0]]).norm();
}

Vec2 Mesh::edge_midpoint(int e) const {
  return 0.5 * (vertices_[conn_.edges[e][0]] + vertices_[conn_.edges[e][1]]);
}

Vec2 Mesh::edge_tangent(int e) const {
  return (vertices_[conn_.edges[e][1]] - vertices_[conn_.edges[e][0]]).normalized();
}

Vec2 Mesh::edge_normal(int e) const {
  const Vec2 t = edge_tangent(e);
  return {t.y(), -t.x()};
}

int Mesh::edge_sign(int t, int k) const {
  // local edge k runs from v_{k+1} to v_{k+2} counterclockwise; its outward
  // normal is the clockwise rotation of that direction.
  const auto& tr = tris_[t];
  return tr[(k + 1) % 3] < tr[(k + 2) % 3] ? 1 : -1;
}

int Mesh::local_index(int t, int v) const {
  for (int k = 0; k < 3; ++k)
    if (tris_[t][k] == v) return k;
  return -1;
}

double Mesh::total_area() const {
  double s = 0;
  for (double a : area_) s += a;
  return s;
}

double Mesh::min_angle() const {
  double amin = std::numbers::pi;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto c = corners(t);
    for (int k = 0; k < 3; ++k) {
      const Vec2 u = c[(k + 1) % 3] - c[k], w = c[(k + 2) % 3] - c[k];
      amin = std::min(amin, std::acos(std::clamp(u.dot(w) / (u.norm() * w.norm()), -1.0, 1.0)));
    }
  }
  return amin;
}

void Mesh::validate() const {
  for (int t = 0; t < num_triangles(); ++t)
    if (!(area_[t] > 0)) throw Error("triangle " + std::to_string(t) + " has nonpositive area");
  // a hanging node shows up as a vertex inside a single-sided edge
  const int nv = num_vertices();
  std::vector<int> deg(nv, 0);
  for (int e = 0; e < num_edges(); ++e)
    if (is_boundary_edge(e)) {
      ++deg[edge(e)[0]];
      ++deg[edge(e)[1]];
    }
  for (int v = 0; v < nv; ++v)
    if (deg[v] != 0 && deg[v] != 2)
      throw Error("boundary is not a simple closed curve at vertex " + std::to_string(v));
  for (int e = 0; e < num_edges(); ++e) {
    if (!is_boundary_edge(e)) continue;
    const Vec2 a = vertices_[edge(e)[0]], b = vertices_[edge(e)[1]];
    // a hanging vertex on e would sit strictly between a and b on the segment
    for (int w : vertex_triangles(edge(e)[0])) {
      for (int v : tris_[w]) {
        if (v == edge(e)[0] || v == edge(e)[1]) continue;
        const Vec2 p = vertices_[v];
        const double cross = (b - a).x() * (p - a).y() - (b - a).y() * (p - a).x();
        const double s = (p - a).dot(b - a) / (b - a).squaredNorm();
        if (std::abs(cross) < 1e-14 * (b - a).squaredNorm() && s > 1e-12 && s < 1 - 1e-12)
          throw Error("hanging node on edge " + std::to_string(e));
      }
    }
  }
  const int euler = num_vertices() - num_edges() + num_triangles();
  if (euler != 1) throw Error("Euler characteristic " + std::to_string(euler) + " != 1");
}

void Mesh::dump(std::ostream& os) const {
  std::ostringstream s;
  s.precision(17);
  s << num_vertices() << ' ' << num_edges() << ' ' << num_triangles() << '\n';
  for (const auto& v : vertices_) s << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : tris_) s << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << s.str();
}

const Connectivity& connectivity(const Mesh& m) { return m.connectivity(); }

Mesh make_domain(Domain d, int initial_subdivisions) {
  if (initial_subdivisions < 0) throw Error("initial_subdivisions must be >= 0");
  std::vector<Vec2> v;
  std::vector<std::array<int, 3>> t;
  auto lshape = [&](double lo, double mid, double hi) {
    // three squares meeting at the re-entrant corner (mid, mid); diagonals
    // through that corner
    v = {{mid, lo}, {hi, lo}, {hi, mid}, {hi, hi}, {mid, hi}, {lo, hi}, {lo, mid}, {mid, mid}};
    t = {{7, 0, 1}, {7, 1, 2}, {7, 2, 3}, {7, 3, 4}, {7, 4, 5}, {7, 5, 6}};
  };
  switch (d) {
    case Domain::unit_square:
      v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
      t = {{0, 1, 2}, {0, 2, 3}};
      break;
    case Domain::square_m1_1:
      v = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
      t = {{0, 1, 2}, {0, 2, 3}};
      break;
    case Domain::lshape_paper: lshape(-1.0, 0.0, 1.0); break;
    case Domain::lshape_small: lshape(0.5, 0.0, -0.5); break;  // point reflection: [0,1/2]^2 removed
  }
  Mesh m = Mesh::from_raw(std::move(v), std::move(t));
  for (int i = 0; i < initial_subdivisions; ++i) m = refine_uniform(m);
  // the initial mesh is the root of the hierarchy handed to callers
  return Mesh(m.vertices(), m.triangles(), std::vector<int>(m.num_triangles(), 0));
}

Mesh refine_uniform(const Mesh& m) {
  std::vector<int> all(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) all[t] = t;
  return refine_nvb(m, all);
}

Mesh refine_nvb(const Mesh& m, std::span<const int> marked) {
  const int ne = m.num_edges(), nt = m.num_triangles();
  std::vector<char> mark(ne, 0);
  std::vector<int> work;
  auto mark_edge = [&](int e) {
    if (!mark[e]) {
      mark[e] = 1;
      work.push_back(e);
    }
  };
  for (int t : marked) {
    if (t < 0 || t >= nt) throw Error("marked triangle out of range");
    for (int k = 0; k < 3; ++k) mark_edge(m.tri_edge(t, k));  // full depth-2 bisection
  }
  // closure: any triangle with a marked edge must bisect its refinement edge
  while (!work.empty()) {
    const int e = work.back();
    work.pop_back();
    for (int t : m.edge_triangles(e))
      if (t >= 0) mark_edge(m.tri_edge(t, 2));
  }
  std::vector<Vec2> verts = m.vertices();
  std::vector<int> mid(ne, -1);
  for (int e = 0; e < ne; ++e)
    if (mark[e]) {
      mid[e] = static_cast<int>(verts.size());
      verts.push_back(m.edge_midpoint(e));
    }
  std::vector<std::array<int, 3>> tris;
  std::vector<int> gen, par;
  tris.reserve(nt + 4 * marked.size());
  auto push = [&](std::array<int, 3> tr, int g, int p) {
    tris.push_back(tr);
    gen.push_back(g);
    par.push_back(p);
  };
  for (int t = 0; t < nt; ++t) {
    const auto [a, b, c] = m.triangle(t);
    const int g = m.generation(t);
    const int e2 = m.tri_edge(t, 2);
    if (!mark[e2]) {
      push({a, b, c}, g, t);
      continue;
    }
    const int pm = mid[e2];
    const int e1 = m.tri_edge(t, 1);  // (c, a)
    const int e0 = m.tri_edge(t, 0);  // (b, c)
    if (mark[e1]) {
      push({pm, c, mid[e1]}, g + 2, t);
      push({a, pm, mid[e1]}, g + 2, t);
    } else {
      push({c, a, pm}, g + 1, t);
    }
    if (mark[e0]) {
      push({pm, b, mid[e0]}, g + 2, t);
      push({c, pm, mid[e0]}, g + 2, t);
    } else {
      push({b, c, pm}, g + 1, t);
    }
  }
  return Mesh(std::move(verts), std::move(tris), std::move(gen), std::move(par));
}

std::vector<int> compose_parents(const std::vector<std::vector<int>>& chain) {
  if (chain.empty()) return {};
  std::vector<int> out = chain.back();
  for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it)
    for (int& p : out) p = (*it)[p];
  return out;
}

}  // namespace obstacle
