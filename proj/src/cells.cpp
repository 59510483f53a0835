#include "fracfem/cells.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracfem {

std::vector<int> label_components(const Triangulation& mesh, std::span<const int> edge_level, int& count) {
  const int nt = static_cast<int>(mesh.num_triangles());
  std::vector<int> label(static_cast<std::size_t>(nt), -1);
  std::vector<int> stack;
  count = 0;
  for (int seed = 0; seed < nt; ++seed) {
    if (label[seed] >= 0) continue;
    label[seed] = count;
    stack.push_back(seed);
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int e : mesh.triangle_edges[t]) {
        if (edge_level[e] != 0) continue;
        const auto& pair = mesh.edge_triangles[e];
        const int other = pair[0] == t ? pair[1] : pair[0];
        if (other >= 0 && label[other] < 0) {
          label[other] = count;
          stack.push_back(other);
        }
      }
    }
    ++count;
  }
  return label;
}

double cell_diameter(const Triangulation& mesh, std::span<const int> triangles) {
  std::vector<LatticePoint> pts;
  pts.reserve(triangles.size() * 3);
  for (int t : triangles)
    for (int v : mesh.triangles[t]) pts.push_back(mesh.vertices[v]);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 2) return 0.0;

  // Monotone chain hull, then all hull pairs.
  auto cross = [](LatticePoint o, LatticePoint a, LatticePoint b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<LatticePoint> hull(2 * pts.size());
  std::size_t m = 0;
  for (const auto& p : pts) {
    while (m >= 2 && cross(hull[m - 2], hull[m - 1], p) <= 0) --m;
    hull[m++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = m + 1; i-- > 0;) {
    while (m >= lower && cross(hull[m - 2], hull[m - 1], pts[i]) <= 0) --m;
    hull[m++] = pts[i];
  }
  hull.resize(m > 1 ? m - 1 : m);

  std::int64_t best = 0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      const std::int64_t dx = hull[i].x - hull[j].x;
      const std::int64_t dy = hull[i].y - hull[j].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  return std::sqrt(static_cast<double>(best)) / static_cast<double>(mesh.cells_per_side());
}

CellPartition extract_cells(const InterfaceNetwork& network, int k, const Triangulation& mesh) {
  CellPartition part;
  part.level = k;
  part.edge_level = interface_edge_levels(network, k, mesh);
  int count = 0;
  part.cell_of_triangle = label_components(mesh, part.edge_level, count);
  part.cells.resize(static_cast<std::size_t>(count));

  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    Cell& cell = part.cells[part.cell_of_triangle[t]];
    cell.triangles.push_back(t);
    cell.area += mesh.area(t);
    for (int v : mesh.triangles[t])
      if (mesh.on_boundary(v)) cell.touches_boundary = true;
  }

  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    if (part.edge_level[e] == 0) continue;
    const auto& pair = mesh.edge_triangles[e];
    if (pair[1] < 0) continue;
    const int a = part.cell_of_triangle[pair[0]];
    const int b = part.cell_of_triangle[pair[1]];
    if (a == b) continue;
    part.cells[a].neighbors.push_back(b);
    part.cells[b].neighbors.push_back(a);
  }

  for (auto& cell : part.cells) {
    std::sort(cell.neighbors.begin(), cell.neighbors.end());
    cell.neighbors.erase(std::unique(cell.neighbors.begin(), cell.neighbors.end()), cell.neighbors.end());
    cell.invariant = true;
  }

  // Midpoints of finer interface edges never lie on a vertex or on Γ^(k),
  // so the located triangle is inside the cell holding the edge.
  for (int j = k + 1; j <= network.depth(); ++j) {
    for (const auto& e : network.level(j)) {
      const Point a = network.to_point(e.a);
      const Point b = network.to_point(e.b);
      const int t = mesh.locate({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
      part.cells[part.cell_of_triangle[t]].invariant = false;
    }
  }

  for (const auto& cell : part.cells)
    if (!cell.invariant) part.diameter_bound = std::max(part.diameter_bound, cell_diameter(mesh, cell.triangles));
  return part;
}

}  // namespace fracfem
