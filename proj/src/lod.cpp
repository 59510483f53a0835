#include "fracfem/lod.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <deque>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace fracfem {

namespace {

SparseMatrix select_block(const SparseMatrix& matrix, std::span<const int> rows, const std::vector<int>& local_col) {
  std::vector<Eigen::Triplet<double>> entries;
  int out_cols = 0;
  for (int c : local_col) out_cols = std::max(out_cols, c + 1);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (SparseMatrix::InnerIterator it(matrix, rows[i]); it; ++it) {
      const int c = local_col[it.col()];
      if (c < 0) throw std::logic_error("projection row leaves its cell");
      entries.emplace_back(static_cast<int>(i), c, it.value());
    }
  SparseMatrix block(static_cast<Eigen::Index>(rows.size()), out_cols);
  block.setFromTriplets(entries.begin(), entries.end());
  return block;
}

}  // namespace

IdealCorrector::IdealCorrector(const SparseMatrix& op, const SparseMatrix& pi) : op_(op), solver_(op, pi) {
  if (op.rows() > ConstrainedSolver::kDirectLimit)
    throw std::invalid_argument("ideal corrector limited to " + std::to_string(ConstrainedSolver::kDirectLimit) +
                                " fine dofs");
}

Vector IdealCorrector::apply(const Vector& w) const { return solver_.solve(Vector(op_ * w)); }

DenseMatrix IdealCorrector::apply(const DenseMatrix& w) const { return solver_.solve(DenseMatrix(op_ * w)); }

LocalRitz::LocalRitz(const ProjectionStack& stack, const SparseMatrix& op) : op_(op) {
  const BrokenSpace& fine = stack.fine();
  const BrokenSpace& coarse = stack.coarse();
  const SparseMatrix& pi = stack.pi_k();
  std::vector<int> local(static_cast<std::size_t>(fine.size()), -1);
  cells_.resize(static_cast<std::size_t>(coarse.num_cells()));
  for (int G = 0; G < coarse.num_cells(); ++G) {
    auto& cell = cells_[G];
    for (int c : stack.fine_cells_in(G))
      for (int d = fine.cell_begin(c); d < fine.cell_end(c); ++d) cell.dofs.push_back(d);
    std::sort(cell.dofs.begin(), cell.dofs.end());
    for (std::size_t i = 0; i < cell.dofs.size(); ++i) local[cell.dofs[i]] = static_cast<int>(i);

    std::vector<int> rows;
    for (int r = coarse.cell_begin(G); r < coarse.cell_end(G); ++r) rows.push_back(r);
    SparseMatrix constraints = select_block(pi, rows, local);
    constraints.conservativeResize(constraints.rows(), static_cast<Eigen::Index>(cell.dofs.size()));
    const SparseMatrix block = principal_block(op, cell.dofs);
    auto solver = std::make_unique<ConstrainedSolver>(block, constraints);
    if (solver->rank() < solver->size()) cell.solver = std::move(solver);
    for (int d : cell.dofs) local[d] = -1;
  }
}

DenseMatrix LocalRitz::apply_local(int G, const DenseMatrix& residual_rows) const {
  const auto& cell = cells_[G];
  if (!cell.solver) return DenseMatrix::Zero(residual_rows.rows(), residual_rows.cols());
  return cell.solver->solve(residual_rows);
}

Vector LocalRitz::apply(int G, const Vector& residual) const {
  const auto& cell = cells_[G];
  Vector local(static_cast<Eigen::Index>(cell.dofs.size()));
  for (std::size_t i = 0; i < cell.dofs.size(); ++i) local[i] = residual[cell.dofs[i]];
  const Vector z = apply_local(G, DenseMatrix(local)).col(0);
  Vector out = Vector::Zero(residual.size());
  for (std::size_t i = 0; i < cell.dofs.size(); ++i) out[cell.dofs[i]] = z[i];
  return out;
}

DenseMatrix LocalRitz::dense_projector(int G) const {
  const auto n = op_.rows();
  const auto& cell = cells_[G];
  const DenseMatrix A = DenseMatrix(op_);
  DenseMatrix rows(static_cast<Eigen::Index>(cell.dofs.size()), n);
  for (std::size_t i = 0; i < cell.dofs.size(); ++i) rows.row(i) = A.row(cell.dofs[i]);
  const DenseMatrix local = apply_local(G, rows);
  DenseMatrix P = DenseMatrix::Zero(n, n);
  for (std::size_t i = 0; i < cell.dofs.size(); ++i) P.row(cell.dofs[i]) = local.row(i);
  return P;
}

CorrectorBasis raw_basis(const ProjectionStack& stack) {
  CorrectorBasis basis;
  basis.k = stack.coarse_scale();
  basis.K = stack.fine_scale();
  basis.columns = DenseMatrix(stack.prolong());
  return basis;
}

CorrectorBasis ideal_basis(const ProjectionStack& stack, const SparseMatrix& op) {
  CorrectorBasis basis = raw_basis(stack);
  basis.ideal = true;
  const IdealCorrector corrector(op, stack.pi_k());
  basis.columns -= corrector.apply(basis.columns);
  return basis;
}

CorrectorBasis richardson_correctors(const ProjectionStack& stack, const LocalRitz& ritz, const SparseMatrix& op,
                                     int nu, double omega, const RichardsonObserver& observer) {
  if (nu < 0 || !(omega > 0.0)) throw std::invalid_argument("richardson_correctors needs nu >= 0 and omega > 0");
  CorrectorBasis basis = raw_basis(stack);
  basis.nu = nu;
  basis.omega = omega;
  const DenseMatrix hats = basis.columns;
  const auto m = hats.cols();
  DenseMatrix correction = DenseMatrix::Zero(hats.rows(), m);
  for (int step = 1; step <= nu; ++step) {
    const DenseMatrix residual = op * (hats - correction);
    DenseMatrix update = DenseMatrix::Zero(hats.rows(), m);
    for (int G = 0; G < ritz.num_cells(); ++G) {
      if (ritz.trivial(G)) continue;
      const auto& dofs = ritz.dofs(G);
      DenseMatrix local(static_cast<Eigen::Index>(dofs.size()), m);
      for (std::size_t i = 0; i < dofs.size(); ++i) local.row(i) = residual.row(dofs[i]);
      if (local.isZero(0.0)) continue;
      const DenseMatrix z = ritz.apply_local(G, local);
      for (std::size_t i = 0; i < dofs.size(); ++i) update.row(dofs[i]) += z.row(i);
    }
    correction += omega * update;
    if (observer) observer(step, hats - correction);
  }
  basis.columns = hats - correction;
  return basis;
}

std::vector<std::vector<int>> column_cell_support(const ProjectionStack& stack, const DenseMatrix& columns) {
  const BrokenSpace& fine = stack.fine();
  std::vector<std::vector<int>> support(static_cast<std::size_t>(columns.cols()));
  for (Eigen::Index p = 0; p < columns.cols(); ++p) {
    auto& cells = support[p];
    for (Eigen::Index d = 0; d < columns.rows(); ++d)
      if (columns(d, p) != 0.0) cells.push_back(stack.coarse_cell_of(fine.cell_of(static_cast<int>(d))));
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  }
  return support;
}

std::vector<int> cell_layers(const CellPartition& partition, int source) {
  std::vector<int> layer(static_cast<std::size_t>(partition.num_cells()), -1);
  std::deque<int> queue{source};
  layer[source] = 0;
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    for (int n : partition.cells[c].neighbors)
      if (layer[n] < 0) {
        layer[n] = layer[c] + 1;
        queue.push_back(n);
      }
  }
  return layer;
}

namespace {

double gram_condition(const DenseMatrix& gram, double& smallest, double& largest) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eigen(gram, Eigen::EigenvaluesOnly);
  const auto& values = eigen.eigenvalues();
  smallest = values.size() > 0 ? values.minCoeff() : 1.0;
  largest = values.size() > 0 ? values.maxCoeff() : 1.0;
  return smallest > 0.0 ? largest / smallest : std::numeric_limits<double>::infinity();
}

}  // namespace

GalerkinSolution ms_galerkin_solve(const CorrectorBasis& basis, const SparseMatrix& op, const Vector& load,
                                   bool drop_dependent) {
  const DenseMatrix& B = basis.columns;
  GalerkinSolution result;
  result.columns.resize(static_cast<std::size_t>(B.cols()));
  for (Eigen::Index p = 0; p < B.cols(); ++p) result.columns[p] = static_cast<int>(p);

  DenseMatrix gram = B.transpose() * (op * B);
  double smallest = 0.0, largest = 0.0;
  result.gram_condition = gram_condition(gram, smallest, largest);
  if (!(result.gram_condition <= kMaxGramCondition) && drop_dependent) {
    result.columns = independent_rows(B.transpose(), 1e-10);
    DenseMatrix reduced(B.rows(), static_cast<Eigen::Index>(result.columns.size()));
    for (std::size_t i = 0; i < result.columns.size(); ++i) reduced.col(i) = B.col(result.columns[i]);
    gram = reduced.transpose() * (op * reduced);
    result.gram_condition = gram_condition(gram, smallest, largest);
  }
  if (!(result.gram_condition <= kMaxGramCondition))
    throw std::runtime_error("multiscale Gram matrix ill-conditioned: condition " +
                             std::to_string(result.gram_condition) + ", eigenvalues in [" + std::to_string(smallest) +
                             ", " + std::to_string(largest) + "], " + std::to_string(result.columns.size()) +
                             " of " + std::to_string(B.cols()) + " columns");
  Vector rhs(static_cast<Eigen::Index>(result.columns.size()));
  for (std::size_t i = 0; i < result.columns.size(); ++i) rhs[i] = B.col(result.columns[i]).dot(load);
  const Vector reduced_coefficients = gram.llt().solve(rhs);
  result.coefficients = Vector::Zero(B.cols());
  for (std::size_t i = 0; i < result.columns.size(); ++i) result.coefficients[result.columns[i]] = reduced_coefficients[i];
  result.u = B * result.coefficients;
  return result;
}

std::vector<LodErrorRow> lod_error_study(Discretization& disc, int K, const std::vector<int>& k_values,
                                         const std::vector<int>& nu_values, double omega, double reference_tol) {
  const ScaleData& fine = disc.at(K);
  const CgResult reference = cg_solve(fine.op, fine.load, reference_tol);
  if (!reference.report.converged) throw std::runtime_error("LOD reference solve did not converge");
  std::vector<LodErrorRow> rows;
  for (int k : k_values) {
    const ProjectionStack stack(disc, K, k);
    std::unique_ptr<LocalRitz> ritz;
    for (int nu : nu_values) {
      CorrectorBasis basis;
      if (nu < 0) {
        basis = ideal_basis(stack, fine.op);
      } else {
        if (!ritz) ritz = std::make_unique<LocalRitz>(stack, fine.op);
        basis = richardson_correctors(stack, *ritz, fine.op, nu, omega);
      }
      const GalerkinSolution sol = ms_galerkin_solve(basis, fine.op, fine.load);
      const Vector error = reference.x - sol.u;
      rows.push_back({k, nu, stack.coarse().size(), stack.fine().size(), disc.h_norm(K, error),
                      l2_norm(*fine.space, error)});
    }
  }
  return rows;
}

}  // namespace fracfem
