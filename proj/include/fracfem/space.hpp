#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "fracfem/cells.hpp"
#include "fracfem/mesh.hpp"

namespace fracfem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Interface edge with the dofs of its two endpoints on both sides. The
/// normal ν of the edge is oriented so that its first nonzero component is
/// positive; `ahead` is the side ν points into. Dof -1 marks an endpoint on
/// ∂Ω (value 0). The jump is ahead - behind.
struct InterfacePair {
  int edge = -1;
  int level = 0;
  std::array<int, 2> behind{-1, -1};
  std::array<int, 2> ahead{-1, -1};
};

/// Broken P1 space: one dof per (cell, vertex) pair, vertices on ∂Ω
/// excluded unless with_boundary is set. Dofs are ordered by cell, then by
/// vertex, so each cell owns the range [cell_offset[c], cell_offset[c+1]).
class BrokenSpace {
 public:
  BrokenSpace(std::shared_ptr<const Triangulation> mesh, std::shared_ptr<const CellPartition> partition,
              bool with_boundary = false);

  const Triangulation& mesh() const { return *mesh_; }
  const CellPartition& partition() const { return *partition_; }
  std::shared_ptr<const Triangulation> shared_mesh() const { return mesh_; }
  std::shared_ptr<const CellPartition> shared_partition() const { return partition_; }

  int scale() const { return partition_->level; }
  bool with_boundary() const { return with_boundary_; }
  int size() const { return static_cast<int>(dofs_.size()); }
  int num_cells() const { return partition_->num_cells(); }

  int cell_of(int dof) const { return dofs_[dof][0]; }
  int vertex_of(int dof) const { return dofs_[dof][1]; }
  int cell_begin(int cell) const { return cell_offset_[cell]; }
  int cell_end(int cell) const { return cell_offset_[cell + 1]; }
  /// Dof of a vertex in a cell, or -1.
  int dof_of(int cell, int vertex) const;
  /// Some triangle of the dof's cell incident to its vertex.
  int triangle_of(int dof) const { return dof_triangle_[dof]; }

  const std::array<int, 3>& triangle_dofs(int t) const { return triangle_dofs_[t]; }
  const std::vector<InterfacePair>& interface_pairs() const { return pairs_; }

 private:
  std::shared_ptr<const Triangulation> mesh_;
  std::shared_ptr<const CellPartition> partition_;
  bool with_boundary_ = false;
  std::vector<std::array<int, 2>> dofs_;
  std::vector<int> cell_offset_;
  std::vector<int> dof_triangle_;
  std::vector<std::array<int, 3>> triangle_dofs_;
  std::vector<InterfacePair> pairs_;
};

/// P1 interpolation of coarse broken functions on the fine space. Every fine
/// cell lies in one coarse cell; a fine dof takes the coarse function of that
/// cell at its vertex. Rows: fine dofs, columns: coarse dofs.
SparseMatrix build_prolongation(const BrokenSpace& coarse, const BrokenSpace& fine);

/// Inclusion of the zero-boundary space into its with_boundary variant on the
/// same partition.
SparseMatrix build_boundary_embedding(const BrokenSpace& interior, const BrokenSpace& extended);

}  // namespace fracfem
