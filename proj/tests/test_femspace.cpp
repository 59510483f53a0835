#include <doctest.h>

#include <set>

#include "fracfem/assembly.hpp"
#include "fracfem/discretization.hpp"
#include "support.hpp"

using namespace fracfem;

namespace {

int coarse_cell_of(const BrokenSpace& coarse, const BrokenSpace& fine, int fine_cell) {
  const int t = fine.partition().cells[fine_cell].triangles.front();
  return coarse.partition().cell_of_triangle[coarse.mesh().locate(fine.mesh().centroid(t))];
}

}  // namespace

TEST_SUITE("femspace") {
  TEST_CASE("single cell space has one dof per interior vertex") {
    const InterfaceNetwork network = build_localized_network(1);
    MeshHierarchy meshes(network.scale_to_mesh);
    auto mesh = meshes.shared_at_level(3);
    auto part = std::make_shared<const CellPartition>(extract_cells(network, 0, *mesh));
    const BrokenSpace space(mesh, part);
    int interior = 0;
    for (std::size_t v = 0; v < mesh->num_vertices(); ++v) interior += !mesh->on_boundary(static_cast<int>(v));
    CHECK(space.size() == interior);
    CHECK(space.size() == 49);
  }

  TEST_CASE("broken dofs count cell vertices with multiplicity") {
    auto disc = testing::localized(3);
    for (int k = 1; k <= 3; ++k) {
      const BrokenSpace& space = *disc.at(k).space;
      int expected = 0;
      for (const auto& cell : space.partition().cells) {
        std::set<int> vertices;
        for (int t : cell.triangles)
          for (int v : space.mesh().triangles[t])
            if (!space.mesh().on_boundary(v)) vertices.insert(v);
        expected += static_cast<int>(vertices.size());
      }
      CHECK(space.size() == expected);
      for (int g = 0; g < space.num_cells(); ++g)
        for (int dof = space.cell_begin(g); dof < space.cell_end(g); ++dof) {
          CHECK(space.cell_of(dof) == g);
          CHECK(space.dof_of(g, space.vertex_of(dof)) == dof);
        }
      for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t)
        for (int dof : space.triangle_dofs(static_cast<int>(t)))
          if (dof >= 0) CHECK(space.cell_of(dof) == space.partition().cell_of_triangle[t]);
    }
    CHECK(disc.at(1).space->size() == 18);
    CHECK(disc.at(2).space->size() == 301);
    CHECK(disc.at(3).space->size() == 4374);
  }

  TEST_CASE("prolongated hats match the coarse hat at fine vertices") {
    auto disc = testing::localized(2);
    const BrokenSpace& coarse = *disc.at(1).space;
    const BrokenSpace& fine = *disc.at(2).space;
    const SparseMatrix P = disc.prolongation(1, 2);
    REQUIRE(P.rows() == fine.size());
    REQUIRE(P.cols() == coarse.size());
    for (int p = 0; p < coarse.size(); ++p) {
      const int cell = coarse.cell_of(p);
      const int vertex = coarse.vertex_of(p);
      for (int i = 0; i < fine.size(); ++i) {
        double expected = 0.0;
        if (coarse_cell_of(coarse, fine, fine.cell_of(i)) == cell) {
          const Point x = fine.mesh().coords(fine.vertex_of(i));
          const int T = coarse.mesh().locate(fine.mesh().centroid(fine.triangle_of(i)));
          const auto& tri = coarse.mesh().triangles[T];
          const Point a = coarse.mesh().coords(tri[0]), b = coarse.mesh().coords(tri[1]),
                      c = coarse.mesh().coords(tri[2]);
          const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
          const double lb = ((x.x - a.x) * (c.y - a.y) - (c.x - a.x) * (x.y - a.y)) / det;
          const double lc = ((b.x - a.x) * (x.y - a.y) - (x.x - a.x) * (b.y - a.y)) / det;
          const double bary[3] = {1.0 - lb - lc, lb, lc};
          for (int m = 0; m < 3; ++m)
            if (tri[m] == vertex) expected = bary[m];
        }
        CHECK(P.coeff(i, p) == doctest::Approx(expected).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("prolongations compose and preserve the energy") {
    auto disc = testing::localized(3);
    const SparseMatrix P12 = disc.prolongation(1, 2);
    const SparseMatrix P23 = disc.prolongation(2, 3);
    const SparseMatrix P13 = disc.prolongation(1, 3);
    const SparseMatrix composed = P23 * P12;
    CHECK((DenseMatrix(composed) - DenseMatrix(P13)).cwiseAbs().maxCoeff() < 1e-14);
    const Vector v = testing::random_vector(disc.at(1).space->size(), 3);
    CHECK(disc.h_norm(3, P13 * v) == doctest::Approx(disc.h_norm(1, v)).epsilon(1e-12));
    const Vector w = testing::random_vector(disc.at(2).space->size(), 4);
    CHECK(disc.h_norm(3, P23 * w) == doctest::Approx(disc.h_norm(2, w)).epsilon(1e-12));
  }

  TEST_CASE("boundary embedding is an injection") {
    auto disc = testing::localized(2);
    const BrokenSpace& interior = *disc.at(2).space;
    const BrokenSpace& extended = *disc.extended_space(2);
    CHECK(extended.with_boundary());
    CHECK(extended.size() > interior.size());
    const SparseMatrix E = build_boundary_embedding(interior, extended);
    CHECK(E.rows() == extended.size());
    CHECK(E.cols() == interior.size());
    CHECK(E.nonZeros() == interior.size());
    const SparseMatrix gram = SparseMatrix(E.transpose()) * E;
    for (int i = 0; i < interior.size(); ++i) CHECK(gram.coeff(i, i) == 1.0);
  }
}
