#include "fracfem/linsolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracfem {

CgResult cg_solve(const SparseMatrix& op, const Vector& rhs, double tol, int max_iter, const Vector* initial) {
  const Eigen::Index n = rhs.size();
  if (op.rows() != n || op.cols() != n) throw std::invalid_argument("cg_solve: dimension mismatch");
  CgResult result;
  result.x = initial ? *initial : Vector::Zero(n);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    result.x.setZero();
    result.report.converged = true;
    return result;
  }
  Vector inv_diag = op.diagonal();
  for (Eigen::Index i = 0; i < n; ++i) inv_diag[i] = inv_diag[i] != 0.0 ? 1.0 / inv_diag[i] : 1.0;

  Vector r = rhs - op * result.x;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  Vector q(n);
  double rz = r.dot(z);
  double rnorm = r.norm();
  int it = 0;
  while (rnorm > tol * bnorm && it < max_iter) {
    q.noalias() = op * p;
    const double alpha = rz / p.dot(q);
    result.x.noalias() += alpha * p;
    r.noalias() -= alpha * q;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    rnorm = r.norm();
    ++it;
  }
  result.report.iterations = it;
  result.report.relative_residual = rnorm / bnorm;
  result.report.converged = rnorm <= tol * bnorm;
  return result;
}

std::vector<int> independent_rows(const DenseMatrix& rows, double relative_tol) {
  if (rows.rows() == 0) return {};
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(rows.transpose());
  qr.setThreshold(relative_tol);
  std::vector<int> kept;
  for (Eigen::Index i = 0; i < qr.rank(); ++i) kept.push_back(static_cast<int>(qr.colsPermutation().indices()[i]));
  std::sort(kept.begin(), kept.end());
  return kept;
}

ConstrainedSolver::ConstrainedSolver(const SparseMatrix& op, const SparseMatrix& constraints)
    : n_(static_cast<int>(op.rows())) {
  if (op.cols() != n_ || constraints.cols() != n_) throw std::invalid_argument("constrained solve: dimension mismatch");

  // Rank decision on the Gram matrix C Cᵀ keeps the work at m x m.
  if (constraints.rows() > 0) {
    const DenseMatrix gram = DenseMatrix(constraints * SparseMatrix(constraints.transpose()));
    Eigen::ColPivHouseholderQR<DenseMatrix> qr(gram);
    qr.setThreshold(1e-13);
    for (Eigen::Index i = 0; i < qr.rank(); ++i)
      kept_rows_.push_back(static_cast<int>(qr.colsPermutation().indices()[i]));
    std::sort(kept_rows_.begin(), kept_rows_.end());
  }
  std::vector<Eigen::Triplet<double>> c_entries;
  for (std::size_t i = 0; i < kept_rows_.size(); ++i)
    for (SparseMatrix::InnerIterator it(constraints, kept_rows_[i]); it; ++it)
      c_entries.emplace_back(static_cast<int>(i), it.col(), it.value());
  C_.resize(static_cast<Eigen::Index>(kept_rows_.size()), n_);
  C_.setFromTriplets(c_entries.begin(), c_entries.end());
  const int m = rank();

  if (n_ + m <= kDirectLimit) {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(op.nonZeros() + 2 * C_.nonZeros()));
    for (int r = 0; r < n_; ++r)
      for (SparseMatrix::InnerIterator it(op, r); it; ++it) entries.emplace_back(r, it.col(), it.value());
    for (const auto& t : c_entries) {
      entries.emplace_back(n_ + t.row(), t.col(), t.value());
      entries.emplace_back(t.col(), n_ + t.row(), t.value());
    }
    Eigen::SparseMatrix<double> saddle(n_ + m, n_ + m);
    saddle.setFromTriplets(entries.begin(), entries.end());
    saddle_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    saddle_->compute(saddle);
    if (saddle_->info() != Eigen::Success) throw std::runtime_error("constrained solve: singular saddle system");
    return;
  }

  cholesky_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  cholesky_->compute(Eigen::SparseMatrix<double>(op));
  if (cholesky_->info() != Eigen::Success) throw std::runtime_error("constrained solve: operator not definite");
  if (m > 0) {
    op_inv_ct_ = cholesky_->solve(DenseMatrix(C_.transpose()));
    schur_.compute(DenseMatrix(C_ * op_inv_ct_));
    if (schur_.info() != Eigen::Success) throw std::runtime_error("constrained solve: singular Schur complement");
  }
}

DenseMatrix ConstrainedSolver::solve(const DenseMatrix& rhs) const {
  if (rhs.rows() != n_) throw std::invalid_argument("constrained solve: rhs size mismatch");
  const int m = rank();
  if (saddle_) {
    DenseMatrix full = DenseMatrix::Zero(n_ + m, rhs.cols());
    full.topRows(n_) = rhs;
    const DenseMatrix sol = saddle_->solve(full);
    return sol.topRows(n_);
  }
  DenseMatrix y = cholesky_->solve(rhs);
  if (m > 0) {
    const DenseMatrix lambda = schur_.solve(DenseMatrix(C_ * y));
    y -= op_inv_ct_ * lambda;
  }
  return y;
}

Vector ConstrainedSolver::solve(const Vector& rhs) const { return solve(DenseMatrix(rhs)).col(0); }

Vector constrained_solve(const SparseMatrix& op, const SparseMatrix& constraints, const Vector& rhs) {
  return ConstrainedSolver(op, constraints).solve(rhs);
}

SparseMatrix principal_block(const SparseMatrix& op, int begin, int end) {
  std::vector<Eigen::Triplet<double>> entries;
  for (int r = begin; r < end; ++r)
    for (SparseMatrix::InnerIterator it(op, r); it; ++it)
      if (it.col() >= begin && it.col() < end) entries.emplace_back(r - begin, it.col() - begin, it.value());
  SparseMatrix block(end - begin, end - begin);
  block.setFromTriplets(entries.begin(), entries.end());
  return block;
}

SparseMatrix principal_block(const SparseMatrix& op, const std::vector<int>& indices) {
  std::vector<int> local(static_cast<std::size_t>(op.cols()), -1);
  for (std::size_t i = 0; i < indices.size(); ++i) local[indices[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (SparseMatrix::InnerIterator it(op, indices[i]); it; ++it)
      if (local[it.col()] >= 0) entries.emplace_back(static_cast<int>(i), local[it.col()], it.value());
  const auto n = static_cast<Eigen::Index>(indices.size());
  SparseMatrix block(n, n);
  block.setFromTriplets(entries.begin(), entries.end());
  return block;
}

SpdFactor::SpdFactor(const SparseMatrix& op, int dense_limit) : n_(static_cast<int>(op.rows())) {
  if (n_ <= dense_limit) {
    dense_.compute(DenseMatrix(op));
    if (dense_.info() != Eigen::Success) throw std::runtime_error("block factorization failed: matrix not definite");
    return;
  }
  sparse_ = std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
  sparse_->compute(Eigen::SparseMatrix<double>(op));
  if (sparse_->info() != Eigen::Success) throw std::runtime_error("block factorization failed: matrix not definite");
}

Vector SpdFactor::solve(const Vector& rhs) const {
  if (sparse_) return sparse_->solve(rhs);
  return dense_.solve(rhs);
}

}  // namespace fracfem
