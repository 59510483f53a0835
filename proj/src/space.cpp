#include "fracfem/space.hpp"

#include <algorithm>
#include <stdexcept>

namespace fracfem {

BrokenSpace::BrokenSpace(std::shared_ptr<const Triangulation> mesh, std::shared_ptr<const CellPartition> partition,
                         bool with_boundary)
    : mesh_(std::move(mesh)), partition_(std::move(partition)), with_boundary_(with_boundary) {
  const Triangulation& m = *mesh_;
  const CellPartition& p = *partition_;
  if (p.cell_of_triangle.size() != m.num_triangles()) throw std::invalid_argument("partition does not match mesh");
  const auto nv = static_cast<std::int64_t>(m.num_vertices());

  std::vector<std::int64_t> keys;
  keys.reserve(m.num_triangles() * 3);
  for (std::size_t t = 0; t < m.num_triangles(); ++t)
    for (int v : m.triangles[t])
      if (with_boundary_ || !m.on_boundary(v)) keys.push_back(p.cell_of_triangle[t] * nv + v);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  dofs_.resize(keys.size());
  cell_offset_.assign(static_cast<std::size_t>(p.num_cells() + 1), 0);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    dofs_[i] = {static_cast<int>(keys[i] / nv), static_cast<int>(keys[i] % nv)};
    ++cell_offset_[dofs_[i][0] + 1];
  }
  for (int c = 0; c < p.num_cells(); ++c) cell_offset_[c + 1] += cell_offset_[c];

  dof_triangle_.assign(keys.size(), -1);
  triangle_dofs_.resize(m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int d = dof_of(p.cell_of_triangle[t], m.triangles[t][i]);
      triangle_dofs_[t][i] = d;
      if (d >= 0 && dof_triangle_[d] < 0) dof_triangle_[d] = static_cast<int>(t);
    }
  }

  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    if (p.edge_level[e] == 0) continue;
    const auto& tris = m.edge_triangles[e];
    if (tris[1] < 0) continue;
    const int a = m.edges[e][0];
    const int b = m.edges[e][1];
    const LatticePoint pa = m.vertices[a];
    const LatticePoint pb = m.vertices[b];
    std::int64_t nx = pb.y - pa.y;
    std::int64_t ny = pa.x - pb.x;
    if (nx < 0 || (nx == 0 && ny < 0)) {
      nx = -nx;
      ny = -ny;
    }
    InterfacePair pair;
    pair.edge = static_cast<int>(e);
    pair.level = p.edge_level[e];
    for (int t : tris) {
      int opposite = -1;
      for (int v : m.triangles[t])
        if (v != a && v != b) opposite = v;
      const LatticePoint po = m.vertices[opposite];
      const bool ahead = nx * (po.x - pa.x) + ny * (po.y - pa.y) > 0;
      const int cell = p.cell_of_triangle[t];
      auto& side = ahead ? pair.ahead : pair.behind;
      side = {dof_of(cell, a), dof_of(cell, b)};
    }
    pairs_.push_back(pair);
  }
}

int BrokenSpace::dof_of(int cell, int vertex) const {
  const auto first = dofs_.begin() + cell_offset_[cell];
  const auto last = dofs_.begin() + cell_offset_[cell + 1];
  const auto it = std::lower_bound(first, last, vertex, [](const std::array<int, 2>& d, int v) { return d[1] < v; });
  if (it == last || (*it)[1] != vertex) return -1;
  return static_cast<int>(it - dofs_.begin());
}

SparseMatrix build_prolongation(const BrokenSpace& coarse, const BrokenSpace& fine) {
  const Triangulation& cm = coarse.mesh();
  const Triangulation& fm = fine.mesh();
  if (cm.level > fm.level) throw std::invalid_argument("prolongation needs a coarse mesh below the fine mesh");
  if (coarse.scale() > fine.scale()) throw std::invalid_argument("prolongation scales inverted");
  const int shift = fm.level - cm.level;

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(fine.size()) * 3);
  for (int d = 0; d < fine.size(); ++d) {
    const int coarse_tri = cm.locate(fm.centroid(fine.triangle_of(d)));
    const int coarse_cell = coarse.partition().cell_of_triangle[coarse_tri];
    const LatticePoint v = fm.vertices[fine.vertex_of(d)];
    std::array<LatticePoint, 3> corner;
    for (int i = 0; i < 3; ++i) {
      const LatticePoint c = cm.vertices[cm.triangles[coarse_tri][i]];
      corner[i] = {c.x << shift, c.y << shift};
    }
    auto cross = [](LatticePoint o, LatticePoint a, LatticePoint b) {
      return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    const double total = static_cast<double>(cross(corner[0], corner[1], corner[2]));
    for (int i = 0; i < 3; ++i) {
      const std::int64_t w = cross(v, corner[(i + 1) % 3], corner[(i + 2) % 3]);
      if (w == 0) continue;
      const int col = coarse.dof_of(coarse_cell, cm.triangles[coarse_tri][i]);
      if (col >= 0) entries.emplace_back(d, col, static_cast<double>(w) / total);
    }
  }
  SparseMatrix P(fine.size(), coarse.size());
  P.setFromTriplets(entries.begin(), entries.end());
  return P;
}

SparseMatrix build_boundary_embedding(const BrokenSpace& interior, const BrokenSpace& extended) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(interior.size()));
  for (int d = 0; d < interior.size(); ++d) {
    const int e = extended.dof_of(interior.cell_of(d), interior.vertex_of(d));
    if (e < 0) throw std::invalid_argument("extended space misses an interior dof");
    entries.emplace_back(e, d, 1.0);
  }
  SparseMatrix E(extended.size(), interior.size());
  E.setFromTriplets(entries.begin(), entries.end());
  return E;
}

}  // namespace fracfem
