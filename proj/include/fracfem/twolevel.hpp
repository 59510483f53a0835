#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fracfem/discretization.hpp"
#include "fracfem/linsolve.hpp"

namespace fracfem {

enum class CellOrder { ascending, descending };

struct TwoLevelConfig {
  int coarse_scale = 1;
  int fine_scale = 2;
  int sweeps = 9;
  CellOrder order = CellOrder::descending;
  bool symmetric = false;  // blocks, coarse, blocks in reverse
  double reference_tol = 1e-12;
};

struct IterationReport {
  int K = 0;
  int fine_dofs = 0;
  int coarse_dofs = 0;
  int num_blocks = 0;
  std::vector<double> errors;   // ν = 0..sweeps
  std::vector<double> factors;  // ν = 1..sweeps
  double geometric_mean = 0.0;
  std::optional<double> discretization_error;  // ‖u_{K+1} - u_K‖ at scale K+1
  std::optional<int> stopping_index;
  SolveReport reference;
};

/// Block Gauss-Seidel over the cells of Ω^(K) followed by an exact coarse
/// correction in S_ℓ. Each block is a principal submatrix of the global
/// operator.
class TwoLevelSolver {
 public:
  using Observer = std::function<void(const Vector&)>;

  TwoLevelSolver(const SparseMatrix& op, const BrokenSpace& fine, SparseMatrix prolongation,
                 CellOrder order = CellOrder::descending, bool symmetric = false);

  /// One iteration w <- w + corrections for A u = rhs. `observer` sees w after
  /// every single correction.
  void sweep(Vector& w, const Vector& rhs, const Observer* observer = nullptr) const;

  /// (I - P_0)(I - P_1)...(I - P_m) assembled densely from the projectors.
  DenseMatrix error_propagation() const;

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int coarse_size() const { return static_cast<int>(prolongation_.cols()); }

 private:
  struct Block {
    int begin;
    int end;
    std::unique_ptr<SpdFactor> factor;
  };
  void correct_block(const Block& block, Vector& w, const Vector& rhs) const;
  void correct_coarse(Vector& w, const Vector& rhs) const;
  std::vector<const Block*> visit_order() const;

  const SparseMatrix& op_;
  SparseMatrix prolongation_;
  SparseMatrix restriction_;
  std::vector<Block> blocks_;
  CellOrder order_;
  bool symmetric_;
  std::unique_ptr<SpdFactor> coarse_factor_;
};

/// Smallest ν with errors[ν] <= discretization_error, or nullopt.
std::optional<int> stopping_check(const IterationReport& report);

/// ‖u_{K+1} - P u_K‖ in the H-norm of scale K+1.
double discretization_error(Discretization& disc, int K, const Vector& u_K, const Vector& u_K1);

/// Reference solutions by scale; the experiment fills missing entries.
using ReferenceStore = std::function<std::optional<Vector>(int K)>;
using ReferenceSink = std::function<void(int K, const Vector&)>;

struct ExperimentHooks {
  ReferenceStore load;
  ReferenceSink store;
  std::function<void(const IterationReport&)> progress;
};

/// Runs the two-level iteration for each K, starting from the prolongated
/// S_ℓ solution. Stopping indices are filled where the K+1 reference is
/// available (computed for K < depth).
std::vector<IterationReport> run_convergence_experiment(Discretization& disc, const std::vector<int>& K_values,
                                                        const TwoLevelConfig& config,
                                                        const ExperimentHooks& hooks = {});

}  // namespace fracfem
