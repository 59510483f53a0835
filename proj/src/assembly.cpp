#include "fracfem/assembly.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace fracfem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct Element {
  double area;
  std::array<std::array<double, 2>, 3> grad;  // ∇λ_i
  std::array<Point, 3> corner;
};

Element element(const Triangulation& mesh, int t) {
  Element el;
  for (int i = 0; i < 3; ++i) el.corner[i] = mesh.coords(mesh.triangles[t][i]);
  el.area = mesh.area(t);
  const double inv = 1.0 / (2.0 * el.area);
  for (int i = 0; i < 3; ++i) {
    const Point& b = el.corner[(i + 1) % 3];
    const Point& c = el.corner[(i + 2) % 3];
    el.grad[i] = {(b.y - c.y) * inv, (c.x - b.x) * inv};
  }
  return el;
}

Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

// Local weighted edge mass for one interface pair: endpoint i, signed dofs.
template <typename Visit>
void visit_jump(const BrokenSpace& space, const NetworkConstants& constants, const Coefficients& coeff,
                const InterfacePair& pair, Visit&& visit) {
  const Triangulation& mesh = space.mesh();
  const Point a = mesh.coords(mesh.edges[pair.edge][0]);
  const Point b = mesh.coords(mesh.edges[pair.edge][1]);
  const double length = std::hypot(b.x - a.x, b.y - a.y);
  const double weight = constants.jump_weight(pair.level) * coeff.B(midpoint(a, b)) * length / 6.0;
  visit(weight, pair);
}

}  // namespace

Coefficients Coefficients::unit() {
  Coefficients c;
  c.A = [](Point) { return Matrix2{{{1.0, 0.0}, {0.0, 1.0}}}; };
  c.B = [](Point) { return 1.0; };
  c.f = [](Point) { return 1.0; };
  c.is_unit = true;
  return c;
}

SparseMatrix assemble_gradient(const BrokenSpace& space, const Coefficients& coeff) {
  const Triangulation& mesh = space.mesh();
  Triplets entries;
  entries.reserve(mesh.num_triangles() * 9);
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const Element el = element(mesh, t);
    if (!(el.area > 0.0)) throw std::logic_error("degenerate triangle in assembly");
    const Matrix2 A = coeff.A(mesh.centroid(t));
    const auto& dofs = space.triangle_dofs(t);
    for (int i = 0; i < 3; ++i) {
      if (dofs[i] < 0) continue;
      const double ax = A[0][0] * el.grad[i][0] + A[0][1] * el.grad[i][1];
      const double ay = A[1][0] * el.grad[i][0] + A[1][1] * el.grad[i][1];
      for (int j = 0; j < 3; ++j)
        if (dofs[j] >= 0) entries.emplace_back(dofs[i], dofs[j], el.area * (ax * el.grad[j][0] + ay * el.grad[j][1]));
    }
  }
  SparseMatrix G(space.size(), space.size());
  G.setFromTriplets(entries.begin(), entries.end());
  return G;
}

SparseMatrix assemble_jump(const BrokenSpace& space, const NetworkConstants& constants, const Coefficients& coeff) {
  Triplets entries;
  entries.reserve(space.interface_pairs().size() * 16);
  for (const auto& pair : space.interface_pairs()) {
    visit_jump(space, constants, coeff, pair, [&](double weight, const InterfacePair& p) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double m = weight * (i == j ? 2.0 : 1.0);
          const std::array<std::pair<int, double>, 2> row{{{p.ahead[i], 1.0}, {p.behind[i], -1.0}}};
          const std::array<std::pair<int, double>, 2> col{{{p.ahead[j], 1.0}, {p.behind[j], -1.0}}};
          for (const auto& [r, sr] : row)
            for (const auto& [c, sc] : col)
              if (r >= 0 && c >= 0) entries.emplace_back(r, c, m * sr * sc);
        }
    });
  }
  SparseMatrix J(space.size(), space.size());
  J.setFromTriplets(entries.begin(), entries.end());
  return J;
}

SparseMatrix assemble_operator(const BrokenSpace& space, const NetworkConstants& constants,
                               const Coefficients& coeff) {
  SparseMatrix op = assemble_gradient(space, coeff);
  op += assemble_jump(space, constants, coeff);
  op.makeCompressed();
  return op;
}

Vector assemble_load(const BrokenSpace& space, const std::function<double(Point)>& f) {
  const Triangulation& mesh = space.mesh();
  Vector load = Vector::Zero(space.size());
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const Element el = element(mesh, t);
    std::array<double, 3> fm;  // f at the midpoint opposite corner i
    for (int i = 0; i < 3; ++i) fm[i] = f(midpoint(el.corner[(i + 1) % 3], el.corner[(i + 2) % 3]));
    const auto& dofs = space.triangle_dofs(t);
    for (int i = 0; i < 3; ++i)
      if (dofs[i] >= 0) load[dofs[i]] += el.area / 6.0 * (fm[(i + 1) % 3] + fm[(i + 2) % 3]);
  }
  return load;
}

SparseMatrix assemble_mass(const BrokenSpace& space) {
  const Triangulation& mesh = space.mesh();
  Triplets entries;
  entries.reserve(mesh.num_triangles() * 9);
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const double area = mesh.area(t);
    const auto& dofs = space.triangle_dofs(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (dofs[i] >= 0 && dofs[j] >= 0) entries.emplace_back(dofs[i], dofs[j], area / (i == j ? 6.0 : 12.0));
  }
  SparseMatrix M(space.size(), space.size());
  M.setFromTriplets(entries.begin(), entries.end());
  return M;
}

double a_norm(const BrokenSpace& space, const NetworkConstants& constants, const Coefficients& coeff,
              const Vector& v) {
  if (v.size() != space.size()) throw std::invalid_argument("vector size does not match the space");
  const Triangulation& mesh = space.mesh();
  auto value = [&](int dof) { return dof >= 0 ? v[dof] : 0.0; };
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const Element el = element(mesh, t);
    const auto& dofs = space.triangle_dofs(t);
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
      gx += value(dofs[i]) * el.grad[i][0];
      gy += value(dofs[i]) * el.grad[i][1];
    }
    const Matrix2 A = coeff.A(mesh.centroid(t));
    sum += el.area * (gx * (A[0][0] * gx + A[0][1] * gy) + gy * (A[1][0] * gx + A[1][1] * gy));
  }
  for (const auto& pair : space.interface_pairs()) {
    visit_jump(space, constants, coeff, pair, [&](double weight, const InterfacePair& p) {
      const double j0 = value(p.ahead[0]) - value(p.behind[0]);
      const double j1 = value(p.ahead[1]) - value(p.behind[1]);
      sum += weight * (2.0 * j0 * j0 + 2.0 * j0 * j1 + 2.0 * j1 * j1);
    });
  }
  return std::sqrt(std::max(sum, 0.0));
}

double h_norm(const BrokenSpace& space, const NetworkConstants& constants, const Vector& v) {
  static const Coefficients unit = Coefficients::unit();
  return a_norm(space, constants, unit, v);
}

double l2_norm(const BrokenSpace& space, const Vector& v) {
  if (v.size() != space.size()) throw std::invalid_argument("vector size does not match the space");
  const Triangulation& mesh = space.mesh();
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto& dofs = space.triangle_dofs(t);
    double sq = 0.0, total = 0.0;
    for (int d : dofs) {
      const double x = d >= 0 ? v[d] : 0.0;
      sq += x * x;
      total += x;
    }
    sum += mesh.area(t) / 12.0 * (sq + total * total);
  }
  return std::sqrt(sum);
}

double energy_norm(const SparseMatrix& op, const Vector& v) { return std::sqrt(std::max(v.dot(op * v), 0.0)); }

void write_matrix_market(std::ostream& out, const SparseMatrix& matrix) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << "\n";
  out.precision(17);
  for (int r = 0; r < matrix.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(matrix, r); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << "\n";
}

}  // namespace fracfem
