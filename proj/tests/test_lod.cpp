#include <doctest.h>

#include <Eigen/Dense>

#include "fracfem/lod.hpp"
#include "support.hpp"

using namespace fracfem;

TEST_SUITE("lod") {
  TEST_CASE("ideal corrector is the a-orthogonal projection onto ker Pi_k") {
    auto disc = testing::localized(2);
    const ScaleData& fine = disc.at(2);
    const ProjectionStack stack(disc, 2, 1);
    const IdealCorrector C(fine.op, stack.pi_k());
    const Vector v = testing::random_vector(stack.fine().size(), 2);
    const Vector w = C.apply(v);
    CHECK((stack.pi_k() * w).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((C.apply(w) - w).norm() < 1e-10 * w.norm());

    const int n = stack.fine().size();
    const DenseMatrix pi = DenseMatrix(stack.pi_k());
    const std::vector<int> kept = independent_rows(pi);
    const int m = static_cast<int>(kept.size());
    DenseMatrix kkt = DenseMatrix::Zero(n + m, n + m);
    kkt.topLeftCorner(n, n) = DenseMatrix(fine.op);
    for (int i = 0; i < m; ++i) {
      kkt.block(n + i, 0, 1, n) = pi.row(kept[i]);
      kkt.block(0, n + i, n, 1) = pi.row(kept[i]).transpose();
    }
    const Vector u = stack.prolong() * testing::random_vector(stack.coarse().size(), 3);
    Vector rhs = Vector::Zero(n + m);
    rhs.head(n) = fine.op * u;
    const Vector oracle = kkt.fullPivLu().solve(rhs).head(n);
    CHECK((C.apply(u) - oracle).norm() <= 1e-9 * std::max(1.0, oracle.norm()));
  }

  TEST_CASE("local Ritz projections") {
    auto disc = testing::localized(3);
    const ScaleData& fine = disc.at(3);
    const ProjectionStack stack(disc, 3, 1);
    const LocalRitz ritz(stack, fine.op);
    CHECK(ritz.num_cells() == stack.coarse().num_cells());
    const Vector zero = Vector::Zero(stack.fine().size());
    for (int G = 0; G < ritz.num_cells(); ++G) {
      CHECK(ritz.apply(G, zero).norm() == 0.0);
      const Vector r = testing::random_vector(stack.fine().size(), 40 + G);
      const Vector w = ritz.apply(G, r);
      if (ritz.trivial(G)) {
        CHECK(w.norm() == 0.0);
        continue;
      }
      CHECK((stack.pi_k() * w).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, w.norm()));
      const Vector again = ritz.apply(G, fine.op * w);
      CHECK((again - w).norm() <= 1e-9 * std::max(1.0, w.norm()));
      for (int i = 0; i < w.size(); ++i)
        if (w[i] != 0.0) CHECK(stack.coarse_cell_of(stack.fine().cell_of(i)) == G);
    }
  }

  TEST_CASE("Richardson correctors grow by at most one layer per step") {
    auto disc = testing::localized(3);
    const ScaleData& fine = disc.at(3);
    const ProjectionStack stack(disc, 3, 2);
    const LocalRitz ritz(stack, fine.op);
    const CorrectorBasis raw = raw_basis(stack);
    CHECK((raw.columns - DenseMatrix(stack.prolong())).cwiseAbs().maxCoeff() == 0.0);
    const CorrectorBasis none = richardson_correctors(stack, ritz, fine.op, 0, 1.0 / 7.0);
    CHECK((none.columns - raw.columns).cwiseAbs().maxCoeff() == 0.0);

    const CellPartition& part = stack.coarse().partition();
    int steps_seen = 0;
    richardson_correctors(stack, ritz, fine.op, 3, 1.0 / 7.0, [&](int step, const DenseMatrix& columns) {
      ++steps_seen;
      const auto support = column_cell_support(stack, columns);
      for (std::size_t p = 0; p < support.size(); ++p) {
        const int home = stack.coarse().cell_of(static_cast<int>(p));
        const std::vector<int> layers = cell_layers(part, home);
        for (int G : support[p]) CHECK(layers[G] <= step);
      }
    });
    CHECK(steps_seen == 3);
  }

  TEST_CASE("Galerkin solutions") {
    auto disc = testing::localized(3);
    const ScaleData& fine = disc.at(3);
    const ProjectionStack stack(disc, 3, 1);

    const GalerkinSolution raw = ms_galerkin_solve(raw_basis(stack), fine.op, fine.load);
    const CgResult coarse = cg_solve(disc.at(1).op, disc.at(1).load, 1e-14);
    CHECK((raw.u - stack.prolong() * coarse.x).norm() < 1e-10 * raw.u.norm());

    const CorrectorBasis ideal = ideal_basis(stack, fine.op);
    const GalerkinSolution zero = ms_galerkin_solve(ideal, fine.op, Vector::Zero(fine.op.rows()));
    CHECK(zero.u.norm() == 0.0);

    const GalerkinSolution sol = ms_galerkin_solve(ideal, fine.op, fine.load);
    CHECK(sol.gram_condition < kMaxGramCondition);
    const Vector u = cg_solve(fine.op, fine.load, 1e-14).x;
    const IdealCorrector C(fine.op, stack.pi_k());
    CHECK(energy_norm(fine.op, (u - sol.u) - C.apply(u)) <= 1e-8 * energy_norm(fine.op, u));
  }

  TEST_CASE("coincident patches are dropped, not fatal") {
    auto disc = testing::localized(3);
    const ProjectionStack stack(disc, 3, 2);
    const CorrectorBasis ideal = ideal_basis(stack, disc.at(3).op);
    const GalerkinSolution sol = ms_galerkin_solve(ideal, disc.at(3).op, disc.at(3).load);
    CHECK(sol.columns.size() < static_cast<std::size_t>(ideal.columns.cols()));
    CHECK_THROWS(ms_galerkin_solve(ideal, disc.at(3).op, disc.at(3).load, false));
  }

  TEST_CASE("error study ordering") {
    auto disc = testing::localized(2);
    const auto rows = lod_error_study(disc, 2, {1}, {0, 1, 2, 3, -1}, 1.0 / 7.0);
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) CHECK(rows[i].h_error < rows[i - 1].h_error);
    CHECK(rows.back().h_error < rows.front().h_error);
    CHECK(rows.front().coarse_dofs == 18);
    CHECK(rows.front().fine_dofs == 301);
  }
}
