#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fracfem/discretization.hpp"
#include "fracfem/linsolve.hpp"

namespace fracfem {

/// Π_k = Π_{S_k} ∘ Π_{H_k} between S_K and S_k as explicit sparse matrices.
///
/// Π_{H_k} acts on the boundary-extended variant of S_K: on each
/// non-invariant cell G of Ω^(k) it returns the continuous P1 function on
/// T^(K)_G closest to v in the broken H¹(G) seminorm with the same mean over
/// G. Invariant cells are left untouched. Π_{S_k} averages over
/// ω_p = supp λ_p ∩ G for every p ∈ N^(k).
class ProjectionStack {
 public:
  ProjectionStack(Discretization& disc, int K, int k);

  int fine_scale() const { return K_; }
  int coarse_scale() const { return k_; }
  const BrokenSpace& fine() const { return *fine_; }
  const BrokenSpace& extended() const { return *extended_; }
  const BrokenSpace& coarse() const { return *coarse_; }

  /// S_K -> extended S_K
  const SparseMatrix& embedding() const { return embedding_; }
  /// extended -> extended
  const SparseMatrix& pi_H() const { return pi_H_; }
  /// extended -> S_k
  const SparseMatrix& pi_S() const { return pi_S_; }
  /// S_K -> S_k
  const SparseMatrix& pi_k() const { return pi_k_; }
  /// S_k -> S_K
  const SparseMatrix& prolong() const { return prolong_; }

  /// Accepts S_K or extended vectors, returns an extended vector.
  Vector apply_pi_Hk(const Vector& v) const;
  Vector apply_pi_Sk(const Vector& extended_v) const;

  int coarse_cell_of(int fine_cell) const { return coarse_cell_of_fine_[fine_cell]; }
  const std::vector<int>& fine_cells_in(int coarse_cell) const { return fine_cells_of_coarse_[coarse_cell]; }
  /// ∫_G v for an extended vector.
  double cell_integral(int coarse_cell, const Vector& extended_v) const;
  /// Broken H¹ seminorm over G for an extended vector.
  double cell_seminorm(int coarse_cell, const Vector& extended_v) const;

 private:
  void build_pi_H();
  void build_pi_S();
  std::vector<int> triangles_in(int coarse_cell) const;

  int K_;
  int k_;
  std::shared_ptr<const BrokenSpace> fine_;
  std::shared_ptr<const BrokenSpace> extended_;
  std::shared_ptr<const BrokenSpace> coarse_;
  std::vector<int> coarse_cell_of_fine_;
  std::vector<std::vector<int>> fine_cells_of_coarse_;
  std::vector<int> coarse_triangle_of_fine_;
  SparseMatrix embedding_;
  SparseMatrix pi_H_;
  SparseMatrix pi_S_;
  SparseMatrix pi_k_;
  SparseMatrix prolong_;
};

struct ProjectionBounds {
  int trials = 0;
  double max_stability = 0.0;      // ‖P Π_k v‖ / ‖v‖
  double max_approximation = 0.0;  // ‖v - P Π_k v‖_0 / (h_k ‖v‖)
};

/// Empirical constants over seeded random vectors of S_K.
ProjectionBounds verify_projection_bounds(const ProjectionStack& stack, Discretization& disc, int trials,
                                          std::uint64_t seed);

}  // namespace fracfem
