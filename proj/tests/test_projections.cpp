#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "fracfem/harness.hpp"
#include "fracfem/projections.hpp"
#include "support.hpp"

using namespace fracfem;

TEST_SUITE("projections") {
  TEST_CASE("Pi_H fixes functions continuous within coarse cells") {
    auto disc = testing::localized(3);
    for (auto [K, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
      const ProjectionStack stack(disc, K, k);
      const Vector w = testing::random_vector(stack.coarse().size(), 10 + K + k);
      const Vector v = stack.prolong() * w;
      const Vector ext = stack.embedding() * v;
      CHECK((stack.apply_pi_Hk(v) - ext).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((stack.apply_pi_Hk(ext) - ext).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("Pi_H removes fine jumps and keeps cell means") {
    auto disc = testing::localized(3);
    const ProjectionStack stack(disc, 3, 1);
    NetworkConstants fine_only = disc.constants();
    fine_only.C[1] = 0.0;
    const SparseMatrix J = assemble_jump(stack.extended(), fine_only, Coefficients::unit());
    const Vector v = testing::random_vector(stack.fine().size(), 21);
    const Vector out = stack.apply_pi_Hk(v);
    CHECK(std::abs(out.dot(J * out)) < 1e-10);
    const Vector ext = stack.embedding() * v;
    for (int G = 0; G < stack.coarse().num_cells(); ++G)
      CHECK(std::abs(stack.cell_integral(G, out) - stack.cell_integral(G, ext)) < 1e-12);
  }

  TEST_CASE("a step across a fine interface is blended to its mean") {
    auto disc = testing::localized(2);
    const ProjectionStack stack(disc, 2, 1);
    const BrokenSpace& ext_space = stack.extended();
    int target = -1;
    for (int G = 0; G < stack.coarse().num_cells(); ++G)
      if (stack.fine_cells_in(G).size() > 1) target = G;
    REQUIRE(target >= 0);
    const int first = stack.fine_cells_in(target).front();
    Vector step = Vector::Zero(ext_space.size());
    for (int i = ext_space.cell_begin(first); i < ext_space.cell_end(first); ++i) step[i] = 1.0;
    const Vector out = stack.apply_pi_Hk(step);
    CHECK(stack.cell_integral(target, out) == doctest::Approx(stack.cell_integral(target, step)).epsilon(1e-12));
    CHECK(stack.cell_seminorm(target, out) <= stack.cell_seminorm(target, step) + 1e-12);
    CHECK(out.maxCoeff() < 1.0);
    CHECK(out.minCoeff() > -1e-12);
  }

  TEST_CASE("Pi_S reproduces cellwise constants") {
    auto disc = testing::localized(3);
    const ProjectionStack stack(disc, 3, 2);
    const BrokenSpace& ext = stack.extended();
    Vector v(ext.size());
    for (int i = 0; i < ext.size(); ++i) v[i] = 1.0 + stack.coarse_cell_of(ext.cell_of(i));
    const Vector coarse = stack.apply_pi_Sk(v);
    for (int p = 0; p < stack.coarse().size(); ++p)
      CHECK(coarse[p] == doctest::Approx(1.0 + stack.coarse().cell_of(p)).epsilon(1e-13));
  }

  TEST_CASE("Pi_S of a prolongated hat is the patch overlap ratio") {
    auto disc = testing::localized(2);
    const ProjectionStack stack(disc, 2, 1);
    const BrokenSpace& coarse = stack.coarse();
    const Triangulation& mesh = coarse.mesh();
    for (int q = 0; q < coarse.size(); ++q) {
      Vector e = Vector::Zero(coarse.size());
      e[q] = 1.0;
      const Vector image = stack.apply_pi_Sk(stack.embedding() * (stack.prolong() * e));
      for (int p = 0; p < coarse.size(); ++p) {
        double expected = 0.0;
        if (coarse.cell_of(p) == coarse.cell_of(q)) {
          double overlap = 0.0, patch = 0.0;
          for (int t : coarse.partition().cells[coarse.cell_of(p)].triangles) {
            const auto& tri = mesh.triangles[t];
            const bool has_p = std::find(tri.begin(), tri.end(), coarse.vertex_of(p)) != tri.end();
            const bool has_q = std::find(tri.begin(), tri.end(), coarse.vertex_of(q)) != tri.end();
            if (!has_p) continue;
            patch += mesh.area(t);
            if (has_q) overlap += mesh.area(t) / 3.0;
          }
          expected = overlap / patch;
        }
        CHECK(image[p] == doctest::Approx(expected).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("matrix form equals the composed application") {
    auto disc = testing::localized(3);
    const ProjectionStack stack(disc, 3, 1);
    const Vector v = testing::random_vector(stack.fine().size(), 4);
    const Vector composed = stack.apply_pi_Sk(stack.apply_pi_Hk(v));
    CHECK((stack.pi_k() * v - composed).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((stack.pi_k() * Vector::Zero(stack.fine().size())).norm() == 0.0);
    CHECK((stack.pi_S() * stack.pi_H() * stack.embedding() - stack.pi_k()).norm() < 1e-12);
  }

  TEST_CASE("suite checks on random vectors") {
    auto disc = testing::localized(3);
    for (auto [K, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
      const ProjectionCheck check = check_projections(disc, K, k, 20, 5);
      CHECK(check.idempotency <= 1e-10);
      CHECK(check.mean_defect <= 1e-10);
      CHECK(check.seminorm_ratio <= 1.0 + 1e-10);
      CHECK(check.local);
      CHECK(std::isfinite(check.bounds.max_stability));
      CHECK(std::isfinite(check.bounds.max_approximation));
    }
  }

  TEST_CASE("empirical bounds are reproducible") {
    auto disc = testing::localized(3);
    const ProjectionStack stack(disc, 3, 1);
    const ProjectionBounds a = verify_projection_bounds(stack, disc, 64, 3);
    const ProjectionBounds b = verify_projection_bounds(stack, disc, 64, 3);
    CHECK(a.trials == 64);
    CHECK(a.max_stability == b.max_stability);
    CHECK(a.max_approximation == b.max_approximation);
    // regression pins for the shipped construction
    CHECK(a.max_stability < 0.01);
    CHECK(a.max_approximation < 0.05);
  }
}
