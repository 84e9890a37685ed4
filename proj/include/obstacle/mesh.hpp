#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "obstacle/types.hpp"

namespace obstacle {

enum class Domain { unit_square, square_m1_1, lshape_paper, lshape_small };

Domain parse_domain(std::string_view name);
std::string to_string(Domain d);
double domain_area(Domain d);

// Derived incidence data. Local edge k of a triangle is opposite local vertex k.
struct Connectivity {
  std::vector<std::array<int, 2>> edges;          // (lo, hi) vertex indices
  std::vector<std::array<int, 3>> tri_edges;      // global edge per local edge
  std::vector<std::array<int, 2>> edge_tris;      // -1 marks "no second triangle"
  std::vector<char> boundary_edge;
  std::vector<char> boundary_vertex;
  std::vector<int> patch_offsets;                 // CSR over vertices
  std::vector<int> patch_tris;
};

struct Patch {
  int vertex = -1;
  std::vector<int> triangles;
  std::vector<Vec2> centroids;
  std::vector<double> areas;
};

// Conforming triangulation. Triangles are stored counterclockwise as
// (v0, v1, v2) with v0v1 the refinement edge, v2 the newest vertex.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
       std::vector<int> generation = {}, std::vector<int> parent = {});

  // Orients triangles counterclockwise and picks the longest edge as the
  // refinement edge (ties: smallest global edge index).
  static Mesh from_raw(std::vector<Vec2> vertices,
                       std::vector<std::array<int, 3>> triangles);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(tris_.size()); }
  int num_edges() const { return static_cast<int>(conn_.edges.size()); }
  int num_interior_edges() const;
  int num_interior_vertices() const;

  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::array<int, 3>& triangle(int t) const { return tris_[t]; }
  const std::vector<std::array<int, 3>>& triangles() const { return tris_; }
  int refinement_edge(int) const { return 2; }
  int generation(int t) const { return generation_[t]; }
  int parent(int t) const { return parent_[t]; }
  const std::vector<int>& parents() const { return parent_; }

  const Connectivity& connectivity() const { return conn_; }
  const std::array<int, 2>& edge(int e) const { return conn_.edges[e]; }
  int tri_edge(int t, int k) const { return conn_.tri_edges[t][k]; }
  const std::array<int, 2>& edge_triangles(int e) const { return conn_.edge_tris[e]; }
  bool is_boundary_edge(int e) const { return conn_.boundary_edge[e] != 0; }
  bool is_boundary_vertex(int v) const { return conn_.boundary_vertex[v] != 0; }
  std::span<const int> vertex_triangles(int v) const;
  Patch patch(int v) const;

  std::array<Vec2, 3> corners(int t) const;
  double area(int t) const { return area_[t]; }
  Vec2 centroid(int t) const;
  double diameter(int t) const;
  double edge_length(int e) const;
  Vec2 edge_midpoint(int e) const;
  Vec2 edge_tangent(int e) const;  // unit, lo -> hi
  Vec2 edge_normal(int e) const;   // unit, tangent rotated clockwise
  // +1 if the global normal of local edge k points out of t.
  int edge_sign(int t, int k) const;
  // Local vertex index of v in t, or -1.
  int local_index(int t, int v) const;

  double total_area() const;
  double min_angle() const;
  // Throws Error describing the first violated invariant.
  void validate() const;

  void dump(std::ostream& os) const;

 private:
  void build();

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<int> generation_;
  std::vector<int> parent_;
  std::vector<double> area_;
  Connectivity conn_;
};

const Connectivity& connectivity(const Mesh& m);

Mesh make_domain(Domain d, int initial_subdivisions);
Mesh refine_uniform(const Mesh& m);
Mesh refine_nvb(const Mesh& m, std::span<const int> marked);

// Maps each triangle of `fine` to its ancestor in `coarse`, where `fine` was
// obtained from `coarse` through `chain` (each entry the parent map of one step).
std::vector<int> compose_parents(const std::vector<std::vector<int>>& chain);

}  // namespace obstacle
