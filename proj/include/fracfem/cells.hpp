#pragma once

#include <span>
#include <vector>

#include "fracfem/mesh.hpp"
#include "fracfem/network.hpp"

namespace fracfem {

struct Cell {
  std::vector<int> triangles;  // ascending
  bool touches_boundary = false;
  bool invariant = false;
  std::vector<int> neighbors;  // cells across an interface edge, ascending
  double area = 0.0;
};

/// Cells of Ω^(k) as triangle sets of a mesh resolving Γ^(k).
struct CellPartition {
  int level = 0;
  std::vector<int> cell_of_triangle;
  std::vector<Cell> cells;
  double diameter_bound = 0.0;  // largest diameter of a non-invariant cell
  std::vector<int> edge_level;  // interface level per mesh edge, 0 if none

  int num_cells() const { return static_cast<int>(cells.size()); }
};

/// Connected components of the triangles, where two triangles are adjacent
/// if they share an edge with edge_level == 0. Components are numbered by
/// their smallest triangle id. Returns the label per triangle.
std::vector<int> label_components(const Triangulation& mesh, std::span<const int> edge_level, int& count);

/// Throws std::invalid_argument if the mesh does not resolve Γ^(k).
CellPartition extract_cells(const InterfaceNetwork& network, int k, const Triangulation& mesh);

/// Largest distance between two vertices of the triangles.
double cell_diameter(const Triangulation& mesh, std::span<const int> triangles);

}  // namespace fracfem
