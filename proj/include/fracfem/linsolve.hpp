#pragma once

#include <memory>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "fracfem/space.hpp"

namespace fracfem {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct CgResult {
  Vector x;
  SolveReport report;
};

/// Jacobi-preconditioned conjugate gradients; stops at ‖b - Ax‖ ≤ tol ‖b‖.
CgResult cg_solve(const SparseMatrix& op, const Vector& rhs, double tol = 1e-10, int max_iter = 100000,
                  const Vector* initial = nullptr);

/// Solver for op x + Cᵀ λ = rhs, C x = 0 with op symmetric and positive
/// definite on ker C. Dependent constraint rows are dropped after a pivoted
/// QR rank decision. Systems up to kDirectLimit unknowns use a sparse LU of
/// the saddle matrix; larger ones eliminate x through a Cholesky factor of op
/// and solve the dense Schur complement.
class ConstrainedSolver {
 public:
  static constexpr int kDirectLimit = 20000;

  ConstrainedSolver(const SparseMatrix& op, const SparseMatrix& constraints);

  Vector solve(const Vector& rhs) const;
  DenseMatrix solve(const DenseMatrix& rhs) const;

  int rank() const { return static_cast<int>(kept_rows_.size()); }
  int size() const { return n_; }

 private:
  int n_ = 0;
  std::vector<int> kept_rows_;
  SparseMatrix C_;  // kept rows only
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> saddle_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> cholesky_;
  DenseMatrix op_inv_ct_;  // op^{-1} Cᵀ
  Eigen::LDLT<DenseMatrix> schur_;
};

/// One-shot form of ConstrainedSolver.
Vector constrained_solve(const SparseMatrix& op, const SparseMatrix& constraints, const Vector& rhs);

/// Indices of linearly independent rows of a dense matrix (pivoted QR with a
/// relative tolerance).
std::vector<int> independent_rows(const DenseMatrix& rows, double relative_tol = 1e-12);

/// Principal submatrix on a contiguous index range.
SparseMatrix principal_block(const SparseMatrix& op, int begin, int end);
/// Principal submatrix on sorted indices.
SparseMatrix principal_block(const SparseMatrix& op, const std::vector<int>& indices);

/// Factorization of an SPD matrix: dense Cholesky for small sizes, sparse
/// Cholesky above `dense_limit`.
class SpdFactor {
 public:
  explicit SpdFactor(const SparseMatrix& op, int dense_limit = 400);
  Vector solve(const Vector& rhs) const;
  int size() const { return n_; }

 private:
  int n_ = 0;
  Eigen::LLT<DenseMatrix> dense_;
  std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> sparse_;
};

}  // namespace fracfem
