#include "fracfem/twolevel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace fracfem {

TwoLevelSolver::TwoLevelSolver(const SparseMatrix& op, const BrokenSpace& fine, SparseMatrix prolongation,
                               CellOrder order, bool symmetric)
    : op_(op),
      prolongation_(std::move(prolongation)),
      restriction_(prolongation_.transpose()),
      order_(order),
      symmetric_(symmetric) {
  if (op.rows() != fine.size() || prolongation_.rows() != fine.size())
    throw std::invalid_argument("two-level solver: dimension mismatch");
  for (int c = 0; c < fine.num_cells(); ++c) {
    const int begin = fine.cell_begin(c);
    const int end = fine.cell_end(c);
    if (begin == end) continue;
    blocks_.push_back({begin, end, std::make_unique<SpdFactor>(principal_block(op, begin, end))});
  }
  const SparseMatrix coarse = restriction_ * op * prolongation_;
  coarse_factor_ = std::make_unique<SpdFactor>(coarse);
}

std::vector<const TwoLevelSolver::Block*> TwoLevelSolver::visit_order() const {
  std::vector<const Block*> seq;
  for (const auto& b : blocks_) seq.push_back(&b);
  if (order_ == CellOrder::descending) std::reverse(seq.begin(), seq.end());
  return seq;
}

void TwoLevelSolver::correct_block(const Block& block, Vector& w, const Vector& rhs) const {
  Vector residual(block.end - block.begin);
  for (int r = block.begin; r < block.end; ++r) {
    double s = rhs[r];
    for (SparseMatrix::InnerIterator it(op_, r); it; ++it) s -= it.value() * w[it.col()];
    residual[r - block.begin] = s;
  }
  w.segment(block.begin, block.end - block.begin) += block.factor->solve(residual);
}

void TwoLevelSolver::correct_coarse(Vector& w, const Vector& rhs) const {
  const Vector residual = rhs - op_ * w;
  w += prolongation_ * coarse_factor_->solve(restriction_ * residual);
}

void TwoLevelSolver::sweep(Vector& w, const Vector& rhs, const Observer* observer) const {
  const auto seq = visit_order();
  for (const Block* b : seq) {
    correct_block(*b, w, rhs);
    if (observer) (*observer)(w);
  }
  correct_coarse(w, rhs);
  if (observer) (*observer)(w);
  if (!symmetric_) return;
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    correct_block(**it, w, rhs);
    if (observer) (*observer)(w);
  }
}

DenseMatrix TwoLevelSolver::error_propagation() const {
  const int n = static_cast<int>(op_.rows());
  const DenseMatrix A = DenseMatrix(op_);
  DenseMatrix E = DenseMatrix::Identity(n, n);
  auto apply_left = [&](const DenseMatrix& projector) { E = (DenseMatrix::Identity(n, n) - projector) * E; };

  auto block_projector = [&](const Block& b) {
    const int size = b.end - b.begin;
    DenseMatrix P = DenseMatrix::Zero(n, n);
    const DenseMatrix rows = A.middleRows(b.begin, size);
    Eigen::LLT<DenseMatrix> llt(A.block(b.begin, b.begin, size, size));
    P.middleRows(b.begin, size) = llt.solve(rows);
    return P;
  };
  const DenseMatrix Pd = DenseMatrix(prolongation_);
  const DenseMatrix coarse = Pd.transpose() * A * Pd;
  const DenseMatrix P0 = Pd * Eigen::LLT<DenseMatrix>(coarse).solve(Pd.transpose() * A);

  const auto seq = visit_order();
  for (const Block* b : seq) apply_left(block_projector(*b));
  apply_left(P0);
  if (symmetric_)
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) apply_left(block_projector(**it));
  return E;
}

std::optional<int> stopping_check(const IterationReport& report) {
  if (!report.discretization_error) return std::nullopt;
  for (std::size_t nu = 0; nu < report.errors.size(); ++nu)
    if (report.errors[nu] <= *report.discretization_error) return static_cast<int>(nu);
  return std::nullopt;
}

double discretization_error(Discretization& disc, int K, const Vector& u_K, const Vector& u_K1) {
  const SparseMatrix P = disc.prolongation(K, K + 1);
  return disc.h_norm(K + 1, u_K1 - P * u_K);
}

namespace {

Vector reference_solution(Discretization& disc, int K, double tol, const ExperimentHooks& hooks,
                          SolveReport* report) {
  if (hooks.load) {
    if (auto cached = hooks.load(K); cached && cached->size() == disc.at(K).space->size()) {
      if (report) *report = {0, 0.0, true};
      return *cached;
    }
  }
  const ScaleData& data = disc.at(K);
  CgResult result = cg_solve(data.op, data.load, tol);
  if (!result.report.converged) throw std::runtime_error("reference solve did not converge at K=" + std::to_string(K));
  if (report) *report = result.report;
  if (hooks.store) hooks.store(K, result.x);
  return result.x;
}

}  // namespace

std::vector<IterationReport> run_convergence_experiment(Discretization& disc, const std::vector<int>& K_values,
                                                        const TwoLevelConfig& config, const ExperimentHooks& hooks) {
  const int ell = config.coarse_scale;
  for (int K : K_values)
    if (K <= ell || K > disc.network().depth()) throw std::invalid_argument("fine scale must satisfy coarse < K <= depth");

  const Vector u_coarse = reference_solution(disc, ell, config.reference_tol, hooks, nullptr);
  std::map<int, Vector> references;
  std::vector<IterationReport> reports;
  for (int K : K_values) {
    IterationReport report;
    report.K = K;
    const ScaleData& data = disc.at(K);
    references[K] = reference_solution(disc, K, config.reference_tol, hooks, &report.reference);
    const Vector& u = references[K];

    TwoLevelSolver solver(data.op, *data.space, disc.prolongation(ell, K), config.order, config.symmetric);
    report.fine_dofs = data.space->size();
    report.coarse_dofs = solver.coarse_size();
    report.num_blocks = solver.num_blocks();

    Vector w = disc.prolongation(ell, K) * u_coarse;
    report.errors.push_back(disc.h_norm(K, u - w));
    for (int nu = 1; nu <= config.sweeps; ++nu) {
      solver.sweep(w, data.load);
      report.errors.push_back(disc.h_norm(K, u - w));
      const double prev = report.errors[nu - 1];
      report.factors.push_back(prev > 0.0 ? report.errors[nu] / prev : 0.0);
    }
    if (config.sweeps > 0 && report.errors.front() > 0.0)
      report.geometric_mean = std::pow(report.errors.back() / report.errors.front(), 1.0 / config.sweeps);
    reports.push_back(std::move(report));
  }

  for (auto& report : reports) {
    const auto next = references.find(report.K + 1);
    if (next == references.end()) continue;
    report.discretization_error = discretization_error(disc, report.K, references[report.K], next->second);
    report.stopping_index = stopping_check(report);
  }
  for (const auto& report : reports)
    if (hooks.progress) hooks.progress(report);
  return reports;
}

}  // namespace fracfem
