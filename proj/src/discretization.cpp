#include "fracfem/discretization.hpp"

#include <stdexcept>

namespace fracfem {

Discretization::Discretization(InterfaceNetwork network, NetworkConstants constants, Coefficients coefficients)
    : network_(std::move(network)),
      constants_(std::move(constants)),
      coefficients_(std::move(coefficients)),
      meshes_(network_.scale_to_mesh) {
  if (constants_.depth() < network_.depth()) throw std::invalid_argument("constants do not cover the network depth");
}

const ScaleData& Discretization::at(int k) {
  if (k < 0 || k > network_.depth()) throw std::invalid_argument("scale outside the network depth");
  auto& slot = scales_[k];
  if (slot) return *slot;
  auto data = std::make_unique<ScaleData>();
  data->k = k;
  data->mesh = meshes_.shared_at_scale(k);
  data->partition = std::make_shared<const CellPartition>(extract_cells(network_, k, *data->mesh));
  data->space = std::make_shared<const BrokenSpace>(data->mesh, data->partition);
  data->op = assemble_operator(*data->space, constants_, coefficients_);
  if (!coefficients_.is_unit) data->unit_op = assemble_operator(*data->space, constants_, Coefficients::unit());
  data->load = assemble_load(*data->space, coefficients_.f);
  slot = std::move(data);
  return *slot;
}

std::shared_ptr<const BrokenSpace> Discretization::extended_space(int k) {
  auto& slot = extended_[k];
  if (!slot) {
    const ScaleData& data = at(k);
    slot = std::make_shared<const BrokenSpace>(data.mesh, data.partition, true);
  }
  return slot;
}

SparseMatrix Discretization::prolongation(int from, int to) {
  const BrokenSpace& coarse = *at(from).space;
  const BrokenSpace& fine = *at(to).space;
  return build_prolongation(coarse, fine);
}

void Discretization::release_above(int k) {
  for (auto it = scales_.upper_bound(k); it != scales_.end();) it = scales_.erase(it);
  for (auto it = extended_.upper_bound(k); it != extended_.end();) it = extended_.erase(it);
  const int keep = k >= 0 && k <= network_.depth() ? network_.mesh_level(k) : 0;
  meshes_.release_above(keep);
}

}  // namespace fracfem
