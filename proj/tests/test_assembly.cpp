#include <doctest.h>

#include <Eigen/Dense>

#include "fracfem/assembly.hpp"
#include "fracfem/discretization.hpp"
#include "fracfem/linsolve.hpp"
#include "support.hpp"

using namespace fracfem;

TEST_SUITE("assembly") {
  TEST_CASE("interior hat on a single cell has diagonal 4") {
    const InterfaceNetwork network = build_localized_network(1);
    MeshHierarchy meshes(network.scale_to_mesh);
    auto mesh = meshes.shared_at_level(3);
    auto part = std::make_shared<const CellPartition>(extract_cells(network, 0, *mesh));
    const BrokenSpace space(mesh, part);
    const SparseMatrix G = assemble_gradient(space, Coefficients::unit());
    for (int i = 0; i < space.size(); ++i) CHECK(G.coeff(i, i) == doctest::Approx(4.0).epsilon(1e-14));
  }

  TEST_CASE("cellwise constants carry no gradient energy") {
    auto disc = testing::localized(2);
    const BrokenSpace& ext = *disc.extended_space(2);
    const SparseMatrix G = assemble_gradient(ext, Coefficients::unit());
    Vector v(ext.size());
    for (int i = 0; i < ext.size(); ++i) v[i] = 1.0 + ext.cell_of(i);
    CHECK(std::abs(v.dot(G * v)) < 1e-12);
  }

  TEST_CASE("unit jump across one straight level-one interface") {
    const InterfaceNetwork base = build_localized_network(1);
    const int r = base.resolution_log2;
    const std::int64_t half = std::int64_t{1} << (r - 1), one = std::int64_t{1} << r;
    const InterfaceNetwork network = make_custom_network({{LatticeEdge({half, 0}, {half, one})}}, r, {0, 1});
    NetworkConstants constants;
    constants.c_frak = 1.0;
    constants.C = {0.0, 2.0};
    constants.d = {std::sqrt(2.0), 0.5};
    constants.r = {0.0, 1.0};
    MeshHierarchy meshes(network.scale_to_mesh);
    auto mesh = meshes.shared_at_scale(1);
    auto part = std::make_shared<const CellPartition>(extract_cells(network, 1, *mesh));
    REQUIRE(part->num_cells() == 2);
    const BrokenSpace ext(mesh, part, true);
    Vector v = Vector::Zero(ext.size());
    const int left = part->cell_of_triangle[mesh->locate({0.1, 0.5})];
    for (int i = ext.cell_begin(left); i < ext.cell_end(left); ++i) v[i] = 1.0;
    const SparseMatrix J = assemble_jump(ext, constants, Coefficients::unit());
    CHECK(v.dot(J * v) == doctest::Approx(4.0).epsilon(1e-14));
  }

  TEST_CASE("continuous functions have zero jump energy") {
    auto disc = testing::localized(3);
    for (int k = 1; k <= 3; ++k) {
      const BrokenSpace& space = *disc.at(k).space;
      Vector v(space.size());
      for (int i = 0; i < space.size(); ++i) {
        const Point p = space.mesh().coords(space.vertex_of(i));
        v[i] = std::sin(3.0 * p.x) * p.y * (1.0 - p.x) * (1.0 - p.y) + p.x * p.y * (1.0 - p.x);
      }
      const SparseMatrix J = assemble_jump(space, disc.constants(), disc.coefficients());
      CHECK(std::abs(v.dot(J * v)) <= 1e-12);
    }
  }

  TEST_CASE("operator is symmetric and positive definite") {
    auto disc = testing::localized(2);
    for (int k = 1; k <= 2; ++k) {
      const SparseMatrix& op = disc.at(k).op;
      CHECK((op - SparseMatrix(op.transpose())).norm() == 0.0);
      CHECK(Eigen::LLT<DenseMatrix>(DenseMatrix(op)).info() == Eigen::Success);
    }
  }

  TEST_CASE("load vector integrates hats exactly") {
    auto disc = testing::localized(2);
    const BrokenSpace& space = *disc.at(2).space;
    const Triangulation& mesh = space.mesh();
    Vector exact_one = Vector::Zero(space.size());
    Vector exact_linear = Vector::Zero(space.size());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto& dofs = space.triangle_dofs(static_cast<int>(t));
      const auto& tri = mesh.triangles[t];
      const double area = mesh.area(static_cast<int>(t));
      double xsum = 0.0;
      for (int v : tri) xsum += mesh.coords(v).x;
      for (int m = 0; m < 3; ++m) {
        if (dofs[m] < 0) continue;
        exact_one[dofs[m]] += area / 3.0;
        exact_linear[dofs[m]] += area / 12.0 * (xsum + mesh.coords(tri[m]).x);
      }
    }
    const Vector one = assemble_load(space, [](Point) { return 1.0; });
    const Vector linear = assemble_load(space, [](Point p) { return p.x; });
    const Vector zero = assemble_load(space, [](Point) { return 0.0; });
    CHECK((one - exact_one).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((linear - exact_linear).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("mass matrix and norms") {
    auto disc = testing::localized(2);
    const BrokenSpace& ext = *disc.extended_space(2);
    const SparseMatrix M = assemble_mass(ext);
    const Vector ones = Vector::Ones(ext.size());
    CHECK(ones.dot(M * ones) == doctest::Approx(1.0).epsilon(1e-14));
    const BrokenSpace& space = *disc.at(2).space;
    const Vector zero = Vector::Zero(space.size());
    CHECK(h_norm(space, disc.constants(), zero) == 0.0);
    CHECK(l2_norm(space, zero) == 0.0);
    const Vector v = testing::random_vector(space.size(), 8);
    CHECK(h_norm(space, disc.constants(), v) == doctest::Approx(energy_norm(disc.at(2).op, v)).epsilon(1e-12));
    CHECK(a_norm(space, disc.constants(), Coefficients::unit(), 2.0 * v) ==
          doctest::Approx(2.0 * energy_norm(disc.at(2).op, v)).epsilon(1e-12));
  }

  TEST_CASE("anisotropic coefficients keep the form symmetric") {
    const InterfaceNetwork network = build_localized_network(2);
    NetworkConstants constants = constants_for(network, 1.0);
    Coefficients coeff = Coefficients::unit();
    coeff.A = [](Point) { return Matrix2{{{2.0, 0.0}, {0.0, 0.5}}}; };
    coeff.B = [](Point p) { return 1.0 + p.x; };
    coeff.is_unit = false;
    Discretization disc(network, constants, coeff);
    const ScaleData& data = disc.at(2);
    CHECK((data.op - SparseMatrix(data.op.transpose())).norm() == 0.0);
    CHECK(data.unit_op.rows() == data.op.rows());
    CHECK(&data.norm_op() == &data.unit_op);
  }
}
