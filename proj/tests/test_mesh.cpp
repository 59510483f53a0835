#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fracfem/cells.hpp"
#include "fracfem/mesh.hpp"
#include "fracfem/network.hpp"

using namespace fracfem;

TEST_SUITE("mesh") {
  TEST_CASE("base mesh") {
    const Triangulation mesh = base_mesh();
    CHECK(mesh.num_vertices() == 4);
    CHECK(mesh.num_triangles() == 2);
    CHECK(mesh.num_edges() == 5);
    for (int t = 0; t < 2; ++t) CHECK(mesh.area(t) == 0.5);
    CHECK(mesh.h() == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("uniform refinement counts, areas and Euler characteristic") {
    Triangulation mesh = base_mesh();
    for (int m = 1; m <= 6; ++m) {
      mesh = refine_uniform(mesh);
      CHECK(mesh.num_triangles() == 2 * (std::size_t{1} << (2 * m)));
      CHECK(mesh.h() == doctest::Approx(std::sqrt(2.0) * std::pow(2.0, -m)));
      double area = 0.0;
      for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        CHECK(mesh.area(static_cast<int>(t)) > 0.0);
        area += mesh.area(static_cast<int>(t));
      }
      CHECK(area == 1.0);
      const long euler = static_cast<long>(mesh.num_vertices()) - static_cast<long>(mesh.num_edges()) +
                         static_cast<long>(mesh.num_triangles());
      CHECK(euler == 1);
    }
    CHECK(refine_uniform(base_mesh()).num_vertices() == 9);
  }

  TEST_CASE("children know their parents") {
    const Triangulation coarse = refine_uniform(base_mesh());
    const Triangulation fine = refine_uniform(coarse);
    std::vector<int> children(coarse.num_triangles(), 0);
    for (int parent : fine.parent_triangle) ++children.at(parent);
    for (int count : children) CHECK(count == 4);
    for (std::size_t t = 0; t < fine.num_triangles(); ++t) {
      const Point c = fine.centroid(static_cast<int>(t));
      CHECK(coarse.locate(c) == fine.parent_triangle[t]);
    }
  }

  TEST_CASE("resolution of the localized network") {
    const InterfaceNetwork network = build_localized_network(2);
    MeshHierarchy meshes(network.scale_to_mesh);
    CHECK(check_resolution(network, 0, base_mesh()));
    CHECK(check_resolution(network, 1, meshes.at_scale(1)));
    CHECK_FALSE(check_resolution(network, 2, meshes.at_scale(1)));
    CHECK(check_resolution(network, 2, meshes.at_scale(2)));
    CHECK_THROWS_AS(extract_cells(network, 2, meshes.at_scale(1)), std::invalid_argument);
  }

  TEST_CASE("cells partition the triangles") {
    const InterfaceNetwork network = build_localized_network(3);
    MeshHierarchy meshes(network.scale_to_mesh);
    const CellPartition single = extract_cells(network, 0, meshes.at_scale(0));
    CHECK(single.num_cells() == 1);
    for (int k = 1; k <= 3; ++k) {
      const Triangulation& mesh = meshes.at_scale(k);
      const CellPartition part = extract_cells(network, k, mesh);
      std::vector<int> seen(mesh.num_triangles(), 0);
      double area = 0.0;
      for (int g = 0; g < part.num_cells(); ++g) {
        area += part.cells[g].area;
        for (int t : part.cells[g].triangles) {
          ++seen[t];
          CHECK(part.cell_of_triangle[t] == g);
        }
        for (int n : part.cells[g].neighbors) {
          const auto& back = part.cells[n].neighbors;
          CHECK(std::find(back.begin(), back.end(), g) != back.end());
        }
      }
      CHECK(area == 1.0);
      CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
      // at the deepest level no finer interface is left, so every cell is invariant
      if (k < network.depth()) {
        CHECK(part.diameter_bound > 0.0);
      } else {
        CHECK(part.diameter_bound == 0.0);
      }
    }
  }

  TEST_CASE("hierarchy releases fine meshes") {
    MeshHierarchy meshes({0, 2, 4});
    CHECK(meshes.at_scale(2).level == 4);
    meshes.release_above(2);
    CHECK(meshes.at_level(2).level == 2);
    CHECK(meshes.at_scale(2).num_triangles() == 512);
  }
}
