#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fracfem/cells.hpp"
#include "fracfem/constants.hpp"
#include "fracfem/mesh.hpp"
#include "fracfem/network.hpp"

using namespace fracfem;

namespace {

bool on_level_one(Point a, Point b) {
  const Point m{(a.x + b.x) / 2, (a.y + b.y) / 2};
  const double eps = 1e-15;
  if (std::abs(a.x - b.x) < eps) {  // vertical
    if (std::abs(m.x - 0.25) < eps) return true;
    return std::abs(m.x - 0.5) < eps && m.y < 0.25;
  }
  if (std::abs(a.y - b.y) < eps) {
    if (std::abs(m.y - 0.25) < eps) return true;
    return std::abs(m.y - 0.5) < eps && m.x < 0.25;
  }
  return false;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("localized level one is the four axis segments") {
    const InterfaceNetwork network = build_localized_network(1);
    REQUIRE(network.depth() == 1);
    for (const auto& e : network.level(1)) CHECK(on_level_one(network.to_point(e.a), network.to_point(e.b)));
    CHECK(network.length(1) == doctest::Approx(2.5).epsilon(1e-15));
  }

  TEST_CASE("localized levels are pairwise disjoint and self-similar in length") {
    const InterfaceNetwork network = build_localized_network(4);
    CHECK(levels_disjoint(network));
    for (int k = 1; k < 4; ++k) CHECK(network.mesh_level(k) == 2 * k);
    CHECK(network.length(1) > 0.0);
    for (int j = 2; j <= 4; ++j) CHECK(network.edge_count(j) > 0);
  }

  TEST_CASE("localized cell counts") {
    const InterfaceNetwork network = build_localized_network(4);
    MeshHierarchy meshes(network.scale_to_mesh);
    const int expected[] = {1, 6, 21, 66, 201};
    for (int k = 0; k <= 4; ++k) CHECK(extract_cells(network, k, meshes.at_scale(k)).num_cells() == expected[k]);
  }

  TEST_CASE("non-invariant localized cells have at most six neighbors") {
    const InterfaceNetwork network = build_localized_network(3);
    MeshHierarchy meshes(network.scale_to_mesh);
    for (int k = 1; k <= 3; ++k) {
      const CellPartition part = extract_cells(network, k, meshes.at_scale(k));
      for (const auto& cell : part.cells)
        if (!cell.invariant) CHECK(cell.neighbors.size() <= 6);
    }
  }

  TEST_CASE("geological network is a pure function of the seed") {
    const auto a = build_geological_network(4, 11);
    const auto b = build_geological_network(4, 11);
    const auto c = build_geological_network(4, 12);
    CHECK(network_hash(a) == network_hash(b));
    CHECK(network_hash(a) != network_hash(c));
    CHECK(levels_disjoint(a));
  }

  TEST_CASE("geological levels are resolved by mesh level j + 3") {
    const auto network = build_geological_network(5, 3);
    MeshHierarchy meshes(network.scale_to_mesh);
    for (int j = 1; j <= 5; ++j) {
      CHECK(network.mesh_level(j) == j + 3);
      CHECK(check_resolution(network, j, meshes.at_level(j + 3)));
    }
    CHECK_FALSE(check_resolution(network, 2, meshes.at_level(4)));
  }

  TEST_CASE("network text form round-trips") {
    for (const auto& network : {build_localized_network(3), build_geological_network(3, 5)}) {
      std::stringstream text;
      write_network(text, network);
      const InterfaceNetwork back = read_network(text);
      CHECK(network_hash(back) == network_hash(network));
      CHECK(back.depth() == network.depth());
      CHECK(back.scale_to_mesh == network.scale_to_mesh);
    }
  }

  TEST_CASE("localized constants") {
    const auto network = build_localized_network(6);
    const NetworkConstants c = constants_for(network, 1.0);
    CHECK(c.C[3] == 8.0);
    CHECK(c.d[2] == doctest::Approx(std::sqrt(2.0) / 16.0).epsilon(1e-15));
    CHECK(c.jump_weight(2) == 16.0);
    // r_k 2^-k = 2 4^-k exceeds d_k = sqrt(2) 4^-k at c = 1; c = 2 is enough
    for (int k = 1; k <= 6; ++k) {
      CHECK_FALSE(c.small_cell_condition(k));
      CHECK(c.r[k] * std::pow(2.0, -k) / c.d[k] == doctest::Approx(std::sqrt(2.0)));
    }
    const NetworkConstants stiff = constants_for(network, 2.0);
    for (int k = 1; k <= 6; ++k) CHECK(stiff.small_cell_condition(k));
    CHECK(c.self_similarity_condition());
    const NetworkConstants shifted = constants_for(network, 1.0, LocalizedConstants::shifted);
    CHECK(shifted.C[3] == 10.0);
    CHECK(shifted.self_similarity_condition());
  }

  TEST_CASE("chord estimate") {
    const auto network = build_localized_network(2);
    const double c1 = estimate_Cj(network, 1, {10000, 0});
    // axis-parallel chords cross level one at most twice
    CHECK(c1 >= 2.0);
    CHECK(c1 <= 4.0);
    CHECK(estimate_Cj(network, 1, {100, 0}) <= estimate_Cj(network, 1, {1000, 0}));
    CHECK(estimate_Cj(network, 1, {500, 9}) == estimate_Cj(network, 1, {500, 9}));

    const auto level_one = build_localized_network(1);
    const InterfaceNetwork sparse =
        make_custom_network({level_one.levels[0], {}}, level_one.resolution_log2, {0, 2, 4});
    CHECK(estimate_Cj(sparse, 2, {100, 0}) == 0.0);
  }
}
