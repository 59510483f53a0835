#include "fracfem/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "fracfem/harness.hpp"
#include "fracfem/lod.hpp"

namespace fracfem {

namespace {

std::string num(double value, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string sci(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", value);
  return buf;
}

Vector random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

ExperimentConfig localized_config(int k_max) {
  ExperimentConfig c;
  c.network = NetworkKind::localized;
  c.k_max = k_max;
  return c;
}

ExperimentConfig geological_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.network = NetworkKind::geological;
  c.seed = seed;
  c.k_max = 6;
  c.K_first = 2;
  c.K_last = 6;
  return c;
}

Discretization make_discretization(const ExperimentConfig& c) {
  InterfaceNetwork network = make_network(c);
  NetworkConstants constants = make_constants(c, network);
  return Discretization(std::move(network), std::move(constants), make_coefficients(c));
}

std::vector<IterationReport> convergence_runs(const ExperimentConfig& c, std::ostream& log) {
  Discretization disc = make_discretization(c);
  TwoLevelConfig solver;
  ExperimentHooks hooks;
  hooks.progress = [&log, &c](const IterationReport& r) {
    log << "  " << to_string(c.network) << " K=" << r.K << " dofs " << r.fine_dofs << " rho " << num(r.geometric_mean)
        << " last " << num(r.factors.back())
        << " stop " << (r.stopping_index ? std::to_string(*r.stopping_index) : "-") << '\n';
  };
  return run_convergence_experiment(disc, c.K_values(), solver, hooks);
}

class Suite {
 public:
  Suite(const AcceptanceOptions& options, std::ostream& log) : options_(options), log_(log) {}

  const std::vector<IterationReport>& localized() {
    if (!localized_) {
      const int K_last = options_.include_K5 ? 5 : 4;
      ExperimentConfig c = localized_config(K_last);
      c.K_last = K_last;
      localized_ = convergence_runs(c, log_);
    }
    return *localized_;
  }

  const std::vector<IterationReport>& geological() {
    if (!geological_) geological_ = convergence_runs(geological_config(options_.geological_seed), log_);
    return *geological_;
  }

  CriterionResult table1() {
    const std::map<int, double> rho_target{{2, 0.222}, {3, 0.259}, {4, 0.264}, {5, 0.264}};
    const std::map<int, double> factor_target{{2, 0.224}, {3, 0.261}, {4, 0.266}, {5, 0.266}};
    CriterionResult r{1, "localized geometric means and asymptotic factors", true, ""};
    std::ostringstream detail;
    for (const auto& report : localized()) {
      const double rho_dev = std::abs(report.geometric_mean - rho_target.at(report.K));
      double factor_dev = 0.0;
      for (std::size_t nu = 5; nu <= report.factors.size(); ++nu)
        factor_dev = std::max(factor_dev, std::abs(report.factors[nu - 1] - factor_target.at(report.K)));
      if (rho_dev > 0.03 || factor_dev > 0.02) r.pass = false;
      detail << "K=" << report.K << " rho " << num(report.geometric_mean) << " (target " << num(rho_target.at(report.K))
             << ") factor9 " << num(report.factors.back()) << " (target " << num(factor_target.at(report.K)) << "); ";
    }
    r.detail = detail.str();
    return r;
  }

  CriterionResult stopping() {
    CriterionResult r{2, "stopping index localized 3+-1, geological 5+-1", true, ""};
    std::ostringstream detail;
    auto check = [&](const std::vector<IterationReport>& reports, int target, const char* label) {
      detail << label << ":";
      bool any = false;
      for (const auto& report : reports) {
        if (!report.stopping_index) continue;
        any = true;
        if (std::abs(*report.stopping_index - target) > 1) r.pass = false;
        detail << " K=" << report.K << "->" << *report.stopping_index;
      }
      if (!any) r.pass = false;
      detail << "; ";
    };
    check(localized(), 3, "localized");
    check(geological(), 5, "geological");
    r.detail = detail.str();
    return r;
  }

  CriterionResult table2() {
    CriterionResult r{3, "geological rho_K in (0.60, 0.87), monotone, saturating", true, ""};
    const auto& reports = geological();
    std::ostringstream detail;
    detail << "seed " << options_.geological_seed << " rho";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const double rho = reports[i].geometric_mean;
      detail << ' ' << num(rho);
      if (!(rho > 0.60 && rho < 0.87)) r.pass = false;
      if (i > 0 && rho <= reports[i - 1].geometric_mean) r.pass = false;
    }
    if (reports.size() < 5 || reports.back().K != 6) {
      r.pass = false;
    } else {
      const double step = reports.back().geometric_mean - reports[reports.size() - 2].geometric_mean;
      detail << "; rho_6 - rho_5 " << num(step);
      if (step > 0.01) r.pass = false;
    }
    r.detail = detail.str();
    return r;
  }

  CriterionResult projections() {
    CriterionResult r{4, "projection idempotency, means, stability, locality", true, ""};
    Discretization disc = make_discretization(localized_config(3));
    std::ostringstream detail;
    for (auto [K, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
      const ProjectionCheck check = check_projections(disc, K, k, 100, 1);
      if (!(check.idempotency <= 1e-10 && check.mean_defect <= 1e-10 && check.seminorm_ratio <= 1.0 + 1e-10 &&
            check.local))
        r.pass = false;
      detail << "(" << K << "," << k << ") idem " << sci(check.idempotency) << " mean " << sci(check.mean_defect)
             << " ratio " << num(check.seminorm_ratio, 12) << (check.local ? " local" : " NONLOCAL") << "; ";
    }
    r.detail = detail.str();
    return r;
  }

  CriterionResult lod() {
    CriterionResult r{5, "LOD identity, h-ratio, corrector decay, support growth", true, ""};
    Discretization disc = make_discretization(localized_config(3));
    const int K = 3;
    const ScaleData& fine = disc.at(K);
    const CgResult reference = cg_solve(fine.op, fine.load, 1e-13);
    const Vector& u = reference.x;
    const double u_norm = energy_norm(fine.op, u);
    std::ostringstream detail;
    std::map<int, double> ideal_error;
    for (int k : {1, 2}) {
      const ProjectionStack stack(disc, K, k);
      const CorrectorBasis ideal = ideal_basis(stack, fine.op);
      const GalerkinSolution sol = ms_galerkin_solve(ideal, fine.op, fine.load);
      const IdealCorrector corrector(fine.op, stack.pi_k());
      const double identity = energy_norm(fine.op, (u - sol.u) - corrector.apply(u)) / u_norm;
      ideal_error[k] = disc.h_norm(K, u - sol.u);
      if (!(identity <= 1e-8)) r.pass = false;

      const LocalRitz ritz(stack, fine.op);
      auto a_distance = [&](const DenseMatrix& columns) {
        const DenseMatrix diff = columns - ideal.columns;
        return std::sqrt(std::max(0.0, (diff.transpose() * (fine.op * diff)).trace()));
      };
      std::vector<double> distance{a_distance(raw_basis(stack).columns)};
      const auto& partition = stack.coarse().partition();
      std::vector<std::vector<int>> layers(partition.num_cells());
      for (int G = 0; G < partition.num_cells(); ++G) layers[G] = cell_layers(partition, G);
      bool support_ok = true;
      auto check_support = [&](int step, const DenseMatrix& columns) {
        const auto support = column_cell_support(stack, columns);
        for (std::size_t p = 0; p < support.size(); ++p) {
          const int home = stack.coarse().cell_of(static_cast<int>(p));
          for (int G : support[p])
            if (layers[home][G] > step) support_ok = false;
        }
      };
      check_support(0, raw_basis(stack).columns);
      const int steps = 6;
      richardson_correctors(stack, ritz, fine.op, steps, 1.0 / 7.0, [&](int step, const DenseMatrix& columns) {
        distance.push_back(a_distance(columns));
        check_support(step, columns);
      });
      double q = 0.0;
      for (std::size_t i = 1; i < distance.size(); ++i) q = std::max(q, distance[i] / distance[i - 1]);
      if (!(q < 1.0) || !support_ok) r.pass = false;
      detail << "k=" << k << " identity " << sci(identity) << " q " << num(q, 4)
             << (support_ok ? " support ok" : " support violated") << "; ";
    }
    const double ratio = ideal_error[2] / ideal_error[1];
    if (!(ratio >= 1.0 / 6.0 && ratio <= 1.0 / 2.5)) r.pass = false;
    detail << "h-error ratio " << num(ratio, 4) << " (bracket [0.1667, 0.4000])";
    r.detail = detail.str();
    return r;
  }

  CriterionResult oracles() {
    CriterionResult r{6, "sweep, CG and constrained solve against dense oracles", true, ""};
    Discretization disc = make_discretization(localized_config(2));
    const ScaleData& data = disc.at(2);
    std::mt19937_64 rng(mix_seed(7, 0x6f7261));
    const int n = data.space->size();

    const TwoLevelSolver solver(data.op, *data.space, disc.prolongation(1, 2));
    const DenseMatrix E = solver.error_propagation();
    const Vector u = random_vector(n, rng);
    Vector w = random_vector(n, rng);
    const Vector predicted = E * (u - w);
    solver.sweep(w, data.op * u);
    const double sweep_dev = (u - w - predicted).cwiseAbs().maxCoeff() / std::max(1.0, predicted.cwiseAbs().maxCoeff());

    const DenseMatrix dense = DenseMatrix(data.op);
    const Vector rhs = random_vector(n, rng);
    const Vector direct = dense.llt().solve(rhs);
    const CgResult cg = cg_solve(data.op, rhs, 1e-14);
    const double cg_dev = (cg.x - direct).norm() / direct.norm();

    const ProjectionStack stack(disc, 2, 1);
    const SparseMatrix& C = stack.pi_k();
    const ConstrainedSolver constrained(data.op, C);
    const Vector x = constrained.solve(rhs);
    const DenseMatrix C_dense = DenseMatrix(C);
    const std::vector<int> kept = independent_rows(C_dense, 1e-12);
    const int m = static_cast<int>(kept.size());
    DenseMatrix kkt = DenseMatrix::Zero(n + m, n + m);
    kkt.topLeftCorner(n, n) = dense;
    for (int i = 0; i < m; ++i) {
      kkt.block(n + i, 0, 1, n) = C_dense.row(kept[i]);
      kkt.block(0, n + i, n, 1) = C_dense.row(kept[i]).transpose();
    }
    Vector kkt_rhs = Vector::Zero(n + m);
    kkt_rhs.head(n) = rhs;
    const Vector lagrange = kkt.fullPivLu().solve(kkt_rhs);
    const double constrained_dev = (x - lagrange.head(n)).norm() / lagrange.head(n).norm();

    r.pass = sweep_dev <= 1e-12 && cg_dev <= 1e-9 && constrained_dev <= 1e-9;
    r.detail = "sweep " + sci(sweep_dev) + " cg " + sci(cg_dev) + " constrained " + sci(constrained_dev);
    return r;
  }

  CriterionResult structure() {
    CriterionResult r{7, "operator symmetry and definiteness, continuity, mesh invariants", true, ""};
    std::ostringstream detail;
    for (const ExperimentConfig& c : {localized_config(3), geological_config(options_.geological_seed)}) {
      ExperimentConfig small = c;
      small.k_max = 3;
      Discretization disc = make_discretization(small);
      for (int k = 1; k <= 3; ++k) {
        const ScaleData& data = disc.at(k);
        const SparseMatrix asym = data.op - SparseMatrix(data.op.transpose());
        const bool symmetric = asym.norm() == 0.0;
        bool definite = true;
        if (k <= 2) definite = Eigen::LLT<DenseMatrix>(DenseMatrix(data.op)).info() == Eigen::Success;

        const BrokenSpace& space = *data.space;
        Vector v(space.size());
        for (int dof = 0; dof < space.size(); ++dof) {
          const Point p = space.mesh().coords(space.vertex_of(dof));
          v[dof] = p.x * (1.0 - p.x) * p.y * (1.0 - p.y) * (1.0 + p.x + 2.0 * p.y);
        }
        const SparseMatrix jump = assemble_jump(space, disc.constants(), disc.coefficients());
        const double jump_energy = std::abs(v.dot(jump * v));

        const Triangulation& mesh = *data.mesh;
        double area = 0.0;
        for (std::size_t t = 0; t < mesh.num_triangles(); ++t) area += mesh.area(static_cast<int>(t));
        const long euler = static_cast<long>(mesh.num_vertices()) - static_cast<long>(mesh.num_edges()) +
                           static_cast<long>(mesh.num_triangles());
        const CellPartition& part = *data.partition;
        std::vector<int> seen(mesh.num_triangles(), 0);
        double cell_area = 0.0;
        bool consistent = true;
        for (int g = 0; g < part.num_cells(); ++g) {
          cell_area += part.cells[g].area;
          for (int t : part.cells[g].triangles) {
            ++seen[t];
            if (part.cell_of_triangle[t] != g) consistent = false;
          }
        }
        const bool covered = std::all_of(seen.begin(), seen.end(), [](int count) { return count == 1; });
        const bool ok = symmetric && definite && jump_energy <= 1e-12 && area == 1.0 && euler == 1 && consistent &&
                        covered && cell_area == 1.0;
        if (!ok) r.pass = false;
        detail << to_string(c.network) << " k=" << k << (ok ? " ok" : " FAILED") << " (jump " << sci(jump_energy)
               << "); ";
      }
    }
    r.detail = detail.str();
    return r;
  }

 private:
  const AcceptanceOptions& options_;
  std::ostream& log_;
  std::optional<std::vector<IterationReport>> localized_;
  std::optional<std::vector<IterationReport>> geological_;
};

}  // namespace

std::string format_result(const CriterionResult& result) {
  std::string detail = result.detail;
  while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
  return std::string(result.pass ? "PASS" : "FAIL") + " " + std::to_string(result.id) + " " + result.name + ": " + detail;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log) {
  Suite suite(options, log);
  auto wanted = [&](int id) {
    return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
  };
  std::vector<CriterionResult> results;
  auto run = [&](int id, auto&& criterion) {
    if (!wanted(id)) return;
    log << "criterion " << id << '\n';
    try {
      results.push_back(criterion());
    } catch (const std::exception& e) {
      results.push_back({id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()});
    }
  };
  run(7, [&] { return suite.structure(); });
  run(6, [&] { return suite.oracles(); });
  run(4, [&] { return suite.projections(); });
  run(5, [&] { return suite.lod(); });
  run(1, [&] { return suite.table1(); });
  run(2, [&] { return suite.stopping(); });
  run(3, [&] { return suite.table2(); });
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return results;
}

}  // namespace fracfem
