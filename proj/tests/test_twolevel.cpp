#include <doctest.h>

#include <Eigen/Dense>

#include "fracfem/twolevel.hpp"
#include "support.hpp"

using namespace fracfem;

TEST_SUITE("twolevel") {
  TEST_CASE("sweep equals the dense error propagation product") {
    auto disc = testing::localized(2);
    const ScaleData& data = disc.at(2);
    for (bool symmetric : {false, true}) {
      const TwoLevelSolver solver(data.op, *data.space, disc.prolongation(1, 2), CellOrder::descending, symmetric);
      CHECK(solver.num_blocks() == 21);
      CHECK(solver.coarse_size() == 18);
      const DenseMatrix E = solver.error_propagation();
      const Vector u = testing::random_vector(data.space->size(), 1);
      Vector w = testing::random_vector(data.space->size(), 2);
      const Vector predicted = E * (u - w);
      solver.sweep(w, data.op * u);
      CHECK((u - w - predicted).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, predicted.cwiseAbs().maxCoeff()));
      if (symmetric) {
        const DenseMatrix AE = DenseMatrix(data.op) * E;
        CHECK((AE - AE.transpose()).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }

  TEST_CASE("exact solution is a fixed point") {
    auto disc = testing::localized(3);
    const ScaleData& data = disc.at(3);
    const Vector u = cg_solve(data.op, data.load, 1e-14).x;
    const TwoLevelSolver solver(data.op, *data.space, disc.prolongation(1, 3));
    Vector w = u;
    solver.sweep(w, data.load);
    CHECK((w - u).cwiseAbs().maxCoeff() <= 1e-11);
  }

  TEST_CASE("observer sees every correction") {
    auto disc = testing::localized(2);
    const ScaleData& data = disc.at(2);
    const TwoLevelSolver solver(data.op, *data.space, disc.prolongation(1, 2));
    int calls = 0;
    const TwoLevelSolver::Observer count = [&calls](const Vector&) { ++calls; };
    Vector w = Vector::Zero(data.space->size());
    solver.sweep(w, data.load, &count);
    CHECK(calls == solver.num_blocks() + 1);
  }

  TEST_CASE("errors decrease and factors settle") {
    auto disc = testing::localized(4);
    const auto reports = run_convergence_experiment(disc, {2, 3, 4}, TwoLevelConfig{});
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) {
      REQUIRE(r.errors.size() == 10);
      for (std::size_t nu = 1; nu < r.errors.size(); ++nu) CHECK(r.errors[nu] < r.errors[nu - 1]);
      CHECK(r.factors.back() < 1.0);
      CHECK(std::abs(r.factors[8] - r.factors[7]) <= 0.005);
      CHECK(r.reference.converged);
    }
    CHECK(reports[0].stopping_index.has_value());
    CHECK(reports[1].stopping_index.has_value());
    CHECK_FALSE(reports[2].stopping_index.has_value());
    CHECK(reports[0].fine_dofs == 301);
    CHECK(reports[1].fine_dofs == 4374);
    CHECK(reports[2].fine_dofs == 66913);
  }

  TEST_CASE("cell order changes the mean factor only slightly") {
    auto disc = testing::localized(3);
    TwoLevelConfig down;
    TwoLevelConfig up;
    up.order = CellOrder::ascending;
    const auto a = run_convergence_experiment(disc, {2, 3}, down);
    const auto b = run_convergence_experiment(disc, {2, 3}, up);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(std::abs(a[i].geometric_mean - b[i].geometric_mean) <= 0.02);
  }

  TEST_CASE("stopping index") {
    IterationReport r;
    r.errors = {0.5, 0.2, 0.05, 0.01};
    CHECK_FALSE(stopping_check(r).has_value());
    r.discretization_error = 0.6;
    CHECK(stopping_check(r) == 0);
    r.discretization_error = 0.06;
    CHECK(stopping_check(r) == 2);
    r.discretization_error = 0.001;
    CHECK_FALSE(stopping_check(r).has_value());
  }

  TEST_CASE("fine scale must exceed the coarse scale") {
    auto disc = testing::localized(2);
    CHECK_THROWS_AS(run_convergence_experiment(disc, {1}, TwoLevelConfig{}), std::invalid_argument);
    CHECK_THROWS_AS(run_convergence_experiment(disc, {3}, TwoLevelConfig{}), std::invalid_argument);
  }
}
