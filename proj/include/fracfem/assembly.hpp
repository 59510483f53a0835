#pragma once

#include <array>
#include <functional>
#include <iosfwd>

#include <Eigen/Core>

#include "fracfem/constants.hpp"
#include "fracfem/space.hpp"

namespace fracfem {

using Vector = Eigen::VectorXd;
using Matrix2 = std::array<std::array<double, 2>, 2>;

struct Coefficients {
  std::function<Matrix2(Point)> A;  // symmetric positive definite
  std::function<double(Point)> B;   // on interfaces, bounded away from 0
  std::function<double(Point)> f;

  /// A = I, B = 1, f = 1.
  static Coefficients unit();
  bool is_unit = false;  // A = I and B = 1; f may differ
};

/// P1 stiffness with A at the triangle centroid.
SparseMatrix assemble_gradient(const BrokenSpace& space, const Coefficients& coeff);

/// Σ_j (1+c)^j C_j ∫_{Γ_j} B [v][w] over levels 1..k of the space.
SparseMatrix assemble_jump(const BrokenSpace& space, const NetworkConstants& constants, const Coefficients& coeff);

/// Gradient plus jump form.
SparseMatrix assemble_operator(const BrokenSpace& space, const NetworkConstants& constants,
                               const Coefficients& coeff);

/// (f, λ_p) by the edge-midpoint rule on every triangle.
Vector assemble_load(const BrokenSpace& space, const std::function<double(Point)>& f);

/// Exact P1 mass matrix of the broken space.
SparseMatrix assemble_mass(const BrokenSpace& space);

/// Broken H^1 seminorm plus weighted jump norms, A = I, B = 1.
double h_norm(const BrokenSpace& space, const NetworkConstants& constants, const Vector& v);
/// Energy norm for the given coefficients.
double a_norm(const BrokenSpace& space, const NetworkConstants& constants, const Coefficients& coeff,
              const Vector& v);
double l2_norm(const BrokenSpace& space, const Vector& v);
/// sqrt(v' M v)
double energy_norm(const SparseMatrix& op, const Vector& v);

/// Matrix Market coordinate format (1-based, general real).
void write_matrix_market(std::ostream& out, const SparseMatrix& matrix);

}  // namespace fracfem
