#pragma once

#include <map>
#include <memory>

#include "fracfem/assembly.hpp"
#include "fracfem/cells.hpp"
#include "fracfem/constants.hpp"
#include "fracfem/mesh.hpp"
#include "fracfem/network.hpp"
#include "fracfem/space.hpp"

namespace fracfem {

/// Everything assembled at one scale k: T^(k), Ω^(k), S_k and the
/// operators of the interface problem on S_k.
struct ScaleData {
  int k = 0;
  std::shared_ptr<const Triangulation> mesh;
  std::shared_ptr<const CellPartition> partition;
  std::shared_ptr<const BrokenSpace> space;
  SparseMatrix op;        // gradient + jump form with the problem coefficients
  SparseMatrix unit_op;   // A = I, B = 1 form; empty when the coefficients are unit
  Vector load;

  /// Operator of the H-norm.
  const SparseMatrix& norm_op() const { return unit_op.rows() > 0 ? unit_op : op; }
};

/// Lazily built hierarchy of discrete problems on one network.
class Discretization {
 public:
  Discretization(InterfaceNetwork network, NetworkConstants constants, Coefficients coefficients);

  const InterfaceNetwork& network() const { return network_; }
  const NetworkConstants& constants() const { return constants_; }
  const Coefficients& coefficients() const { return coefficients_; }
  MeshHierarchy& meshes() { return meshes_; }

  const ScaleData& at(int k);
  /// S_k including dofs on ∂Ω.
  std::shared_ptr<const BrokenSpace> extended_space(int k);
  /// S_from -> S_to interpolation.
  SparseMatrix prolongation(int from, int to);
  /// H-norm at scale k.
  double h_norm(int k, const Vector& v) { return energy_norm(at(k).norm_op(), v); }

  /// Drops scale data above k and the meshes they used.
  void release_above(int k);

 private:
  InterfaceNetwork network_;
  NetworkConstants constants_;
  Coefficients coefficients_;
  MeshHierarchy meshes_;
  std::map<int, std::unique_ptr<ScaleData>> scales_;
  std::map<int, std::shared_ptr<const BrokenSpace>> extended_;
};

}  // namespace fracfem
