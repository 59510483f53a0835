#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fracfem/linsolve.hpp"
#include "fracfem/projections.hpp"

namespace fracfem {

/// a-orthogonal projection C onto V_k = ker Π_k within S_K.
class IdealCorrector {
 public:
  IdealCorrector(const SparseMatrix& op, const SparseMatrix& pi);
  Vector apply(const Vector& w) const;
  DenseMatrix apply(const DenseMatrix& w) const;

 private:
  const SparseMatrix& op_;
  ConstrainedSolver solver_;
};

/// Ritz projections P_G onto {z supported in G, Π_k z = 0}, one per cell of
/// Ω^(k).
class LocalRitz {
 public:
  LocalRitz(const ProjectionStack& stack, const SparseMatrix& op);

  int num_cells() const { return static_cast<int>(cells_.size()); }
  /// Fine dofs of the cell, ascending.
  const std::vector<int>& dofs(int G) const { return cells_[G].dofs; }
  /// True when the local kernel space is {0}.
  bool trivial(int G) const { return !cells_[G].solver; }

  /// P_G applied to the functional `residual` (length of S_K); full-length result.
  Vector apply(int G, const Vector& residual) const;
  /// Same for several functionals given on the cell's dofs only.
  DenseMatrix apply_local(int G, const DenseMatrix& residual_rows) const;
  /// P_G as a dense matrix acting on S_K (small instances only).
  DenseMatrix dense_projector(int G) const;

 private:
  struct CellSolver {
    std::vector<int> dofs;
    std::unique_ptr<ConstrainedSolver> solver;
  };
  const SparseMatrix& op_;
  std::vector<CellSolver> cells_;
};

struct CorrectorBasis {
  int k = 0;
  int K = 0;
  int nu = 0;  // Richardson steps
  bool ideal = false;
  double omega = 0.0;
  DenseMatrix columns;  // (I - C_ν) λ_p for every p ∈ N^(k)
};

/// Prolongated hats, ν = 0.
CorrectorBasis raw_basis(const ProjectionStack& stack);
/// (I - C) λ_p with the ideal corrector.
CorrectorBasis ideal_basis(const ProjectionStack& stack, const SparseMatrix& op);

/// Observer sees the basis after every step ν = 1..nu.
using RichardsonObserver = std::function<void(int step, const DenseMatrix& columns)>;

/// C_{ν+1} = C_ν + ω Σ_G P_G (I - C_ν) on every hat, C_0 = 0.
CorrectorBasis richardson_correctors(const ProjectionStack& stack, const LocalRitz& ritz, const SparseMatrix& op,
                                     int nu, double omega, const RichardsonObserver& observer = {});

/// Coarse cells touched by each column (exact nonzeros).
std::vector<std::vector<int>> column_cell_support(const ProjectionStack& stack, const DenseMatrix& columns);
/// Edge-neighbor distance in Ω^(k) from every cell to `source`.
std::vector<int> cell_layers(const CellPartition& partition, int source);

inline constexpr double kMaxGramCondition = 1e12;

struct GalerkinSolution {
  Vector coefficients;  // zero on dropped columns
  std::vector<int> columns;  // columns kept in the Gram system
  Vector u;  // fine representation
  double gram_condition = 0.0;
};

/// Dense Galerkin solve in the span of the basis columns. Coincident Clément
/// patches make some ideal columns linearly dependent; with drop_dependent a
/// pivoted QR keeps an independent subset first. Throws if the Gram matrix
/// condition number still exceeds kMaxGramCondition.
GalerkinSolution ms_galerkin_solve(const CorrectorBasis& basis, const SparseMatrix& op, const Vector& load,
                                   bool drop_dependent = true);

struct LodErrorRow {
  int k = 0;
  int nu = 0;  // -1 for the ideal basis
  int coarse_dofs = 0;
  int fine_dofs = 0;
  double h_error = 0.0;
  double l2_error = 0.0;
};

/// h- and L2-errors of u_k^(ν) against u_{S_K} for each k and ν (ν < 0 is
/// the ideal basis).
std::vector<LodErrorRow> lod_error_study(Discretization& disc, int K, const std::vector<int>& k_values,
                                         const std::vector<int>& nu_values, double omega, double reference_tol = 1e-12);

}  // namespace fracfem
