#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <vector>

#include "fracfem/lattice.hpp"

namespace fracfem {

class InterfaceNetwork;

/// Uniformly refined triangulation of the unit square. Every mesh in this
/// project descends from base_mesh() by red refinement, so the vertices form
/// the full lattice with spacing 2^-level and every lattice square is split
/// along its (1,1) diagonal. Vertex coordinates are integers over 2^level.
class Triangulation {
 public:
  int level = 0;
  std::vector<LatticePoint> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<std::array<int, 2>> edges;      // a < b by coordinates
  std::vector<std::array<int, 2>> edge_triangles;  // second entry -1 on the boundary
  std::vector<std::array<int, 3>> triangle_edges;  // edge (v_i, v_{i+1})
  std::vector<int> parent_triangle;                // -1 on the base mesh

  /// Lattice points per side minus one.
  std::int64_t cells_per_side() const { return std::int64_t{1} << level; }
  double h() const;

  Point coords(int v) const { return to_point(vertices[v], level); }
  Point centroid(int t) const;
  double area(int t) const;
  bool on_boundary(int v) const;

  /// Vertex at a lattice point given over 2^log2_den, or -1.
  int find_vertex(LatticePoint p, int log2_den) const;
  /// Edge joining two vertices, or -1.
  int find_edge(int v0, int v1) const;
  /// Triangle containing the point; points on edges resolve to the triangle of
  /// the lower-left lattice square, lower half preferred.
  int locate(Point p) const;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  std::size_t num_edges() const { return edges.size(); }

  /// Rebuilds edges and lookup tables from vertices/triangles.
  void finalize();

 private:
  std::vector<int> vertex_lookup_;
  std::vector<int> edge_lookup_;
  std::vector<int> square_lookup_;
};

Triangulation base_mesh();
Triangulation refine_uniform(const Triangulation& mesh);

/// True iff every edge of Γ_j, j <= k, is a union of mesh edges.
bool check_resolution(const InterfaceNetwork& network, int k, const Triangulation& mesh);

/// Per mesh edge, the interface level j <= k it lies on (0 if none).
/// Throws if the mesh does not resolve Γ^(k).
std::vector<int> interface_edge_levels(const InterfaceNetwork& network, int k,
                                       const Triangulation& mesh);

/// Nested meshes T^(0), T^(1), ... by refinement level, plus the map from
/// scale k to the refinement level resolving Γ^(k).
class MeshHierarchy {
 public:
  MeshHierarchy() = default;
  MeshHierarchy(std::vector<int> scale_to_mesh);

  /// Refines until `level` exists.
  const Triangulation& at_level(int level);
  std::shared_ptr<const Triangulation> shared_at_level(int level);
  std::shared_ptr<const Triangulation> shared_at_scale(int k) { return shared_at_level(scale_to_mesh.at(k)); }
  const Triangulation& at_scale(int k) { return at_level(scale_to_mesh.at(k)); }

  /// Drops meshes finer than `level` to release memory.
  void release_above(int level);

  std::vector<int> scale_to_mesh;

 private:
  std::vector<std::shared_ptr<const Triangulation>> meshes_;
};

/// Plain text: "vertices N" then "x y" rows, "triangles M" then "a b c" rows.
void write_mesh(std::ostream& out, const Triangulation& mesh);

}  // namespace fracfem
