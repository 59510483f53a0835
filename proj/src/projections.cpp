#include "fracfem/projections.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fracfem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using Gradients = std::array<std::array<double, 2>, 3>;

Gradients barycentric_gradients(const Triangulation& mesh, int t) {
  std::array<Point, 3> p;
  for (int i = 0; i < 3; ++i) p[i] = mesh.coords(mesh.triangles[t][i]);
  const double inv = 1.0 / (2.0 * mesh.area(t));
  Gradients g;
  for (int i = 0; i < 3; ++i) {
    const Point& b = p[(i + 1) % 3];
    const Point& c = p[(i + 2) % 3];
    g[i] = {(b.y - c.y) * inv, (c.x - b.x) * inv};
  }
  return g;
}

double dot(const std::array<double, 2>& a, const std::array<double, 2>& b) { return a[0] * b[0] + a[1] * b[1]; }

}  // namespace

ProjectionStack::ProjectionStack(Discretization& disc, int K, int k) : K_(K), k_(k) {
  if (k < 1 || k >= K) throw std::invalid_argument("projection stack needs 1 <= k < K");
  fine_ = disc.at(K).space;
  coarse_ = disc.at(k).space;
  extended_ = disc.extended_space(K);
  prolong_ = disc.prolongation(k, K);
  embedding_ = build_boundary_embedding(*fine_, *extended_);

  const Triangulation& fmesh = fine_->mesh();
  const Triangulation& cmesh = coarse_->mesh();
  coarse_triangle_of_fine_.resize(fmesh.num_triangles());
  for (int t = 0; t < static_cast<int>(fmesh.num_triangles()); ++t)
    coarse_triangle_of_fine_[t] = cmesh.locate(fmesh.centroid(t));

  const CellPartition& fpart = fine_->partition();
  const CellPartition& cpart = coarse_->partition();
  coarse_cell_of_fine_.resize(fpart.num_cells());
  fine_cells_of_coarse_.assign(cpart.num_cells(), {});
  for (int c = 0; c < fpart.num_cells(); ++c) {
    const int t = fpart.cells[c].triangles.front();
    const int G = cpart.cell_of_triangle[coarse_triangle_of_fine_[t]];
    coarse_cell_of_fine_[c] = G;
    fine_cells_of_coarse_[G].push_back(c);
  }

  build_pi_H();
  build_pi_S();
  pi_k_ = pi_S_ * pi_H_ * embedding_;
  pi_k_.prune(0.0);
}

std::vector<int> ProjectionStack::triangles_in(int coarse_cell) const {
  std::vector<int> tris;
  for (int c : fine_cells_of_coarse_[coarse_cell]) {
    const auto& cell = fine_->partition().cells[c].triangles;
    tris.insert(tris.end(), cell.begin(), cell.end());
  }
  std::sort(tris.begin(), tris.end());
  return tris;
}

void ProjectionStack::build_pi_H() {
  const BrokenSpace& ext = *extended_;
  const Triangulation& mesh = ext.mesh();
  const CellPartition& cpart = coarse_->partition();
  Triplets entries;
  std::vector<int> local_vertex(mesh.num_vertices(), -1);
  std::vector<int> local_dof(static_cast<std::size_t>(ext.size()), -1);

  for (int G = 0; G < cpart.num_cells(); ++G) {
    std::vector<int> dofs;
    for (int c : fine_cells_of_coarse_[G])
      for (int d = ext.cell_begin(c); d < ext.cell_end(c); ++d) dofs.push_back(d);
    if (cpart.cells[G].invariant || fine_cells_of_coarse_[G].size() == 1) {
      for (int d : dofs) entries.emplace_back(d, d, 1.0);
      continue;
    }

    const std::vector<int> tris = triangles_in(G);
    std::vector<int> vertices;
    for (int t : tris)
      for (int v : mesh.triangles[t])
        if (local_vertex[v] < 0) {
          local_vertex[v] = static_cast<int>(vertices.size());
          vertices.push_back(v);
        }
    for (std::size_t i = 0; i < dofs.size(); ++i) local_dof[dofs[i]] = static_cast<int>(i);

    const auto n = static_cast<Eigen::Index>(vertices.size());
    const auto ne = static_cast<Eigen::Index>(dofs.size());
    DenseMatrix saddle = DenseMatrix::Zero(n + 1, n + 1);
    DenseMatrix rhs = DenseMatrix::Zero(n + 1, ne);
    Vector mean_row = Vector::Zero(ne);
    double area = 0.0;
    for (int t : tris) {
      const Gradients g = barycentric_gradients(mesh, t);
      const double a = mesh.area(t);
      const auto& tdofs = ext.triangle_dofs(t);
      area += a;
      for (int i = 0; i < 3; ++i) {
        const int li = local_vertex[mesh.triangles[t][i]];
        saddle(li, n) += a / 3.0;
        saddle(n, li) += a / 3.0;
        mean_row[local_dof[tdofs[i]]] += a / 3.0;
        for (int j = 0; j < 3; ++j) {
          const double s = a * dot(g[i], g[j]);
          saddle(li, local_vertex[mesh.triangles[t][j]]) += s;
          rhs(li, local_dof[tdofs[j]]) += s;
        }
      }
    }
    const DenseMatrix solution = saddle.partialPivLu().solve(rhs);
    for (Eigen::Index r = 0; r < ne; ++r) {
      const int lv = local_vertex[ext.vertex_of(dofs[r])];
      for (Eigen::Index c = 0; c < ne; ++c) {
        const double value = solution(lv, c) + mean_row[c] / area;
        if (value != 0.0) entries.emplace_back(dofs[r], dofs[c], value);
      }
    }
    for (int v : vertices) local_vertex[v] = -1;
    for (int d : dofs) local_dof[d] = -1;
  }
  pi_H_.resize(ext.size(), ext.size());
  pi_H_.setFromTriplets(entries.begin(), entries.end());
}

void ProjectionStack::build_pi_S() {
  const BrokenSpace& ext = *extended_;
  const Triangulation& fmesh = ext.mesh();
  const Triangulation& cmesh = coarse_->mesh();
  const CellPartition& cpart = coarse_->partition();
  Triplets entries;
  Vector patch_area = Vector::Zero(coarse_->size());
  for (int t = 0; t < static_cast<int>(fmesh.num_triangles()); ++t) {
    const int T = coarse_triangle_of_fine_[t];
    const int G = cpart.cell_of_triangle[T];
    const double a = fmesh.area(t);
    const auto& tdofs = ext.triangle_dofs(t);
    for (int p : cmesh.triangles[T]) {
      const int row = coarse_->dof_of(G, p);
      if (row < 0) continue;
      patch_area[row] += a;
      for (int d : tdofs) entries.emplace_back(row, d, a / 3.0);
    }
  }
  for (auto& e : entries) e = {e.row(), e.col(), e.value() / patch_area[e.row()]};
  pi_S_.resize(coarse_->size(), ext.size());
  pi_S_.setFromTriplets(entries.begin(), entries.end());
}

Vector ProjectionStack::apply_pi_Hk(const Vector& v) const {
  if (v.size() == fine_->size()) return pi_H_ * (embedding_ * v);
  if (v.size() == extended_->size()) return pi_H_ * v;
  throw std::invalid_argument("apply_pi_Hk: vector size matches neither S_K nor its extension");
}

Vector ProjectionStack::apply_pi_Sk(const Vector& extended_v) const {
  if (extended_v.size() != extended_->size()) throw std::invalid_argument("apply_pi_Sk expects an extended vector");
  return pi_S_ * extended_v;
}

double ProjectionStack::cell_integral(int coarse_cell, const Vector& extended_v) const {
  const Triangulation& mesh = extended_->mesh();
  double sum = 0.0;
  for (int t : triangles_in(coarse_cell)) {
    double s = 0.0;
    for (int d : extended_->triangle_dofs(t)) s += extended_v[d];
    sum += mesh.area(t) / 3.0 * s;
  }
  return sum;
}

double ProjectionStack::cell_seminorm(int coarse_cell, const Vector& extended_v) const {
  const Triangulation& mesh = extended_->mesh();
  double sum = 0.0;
  for (int t : triangles_in(coarse_cell)) {
    const Gradients g = barycentric_gradients(mesh, t);
    const auto& tdofs = extended_->triangle_dofs(t);
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
      gx += extended_v[tdofs[i]] * g[i][0];
      gy += extended_v[tdofs[i]] * g[i][1];
    }
    sum += mesh.area(t) * (gx * gx + gy * gy);
  }
  return std::sqrt(sum);
}

ProjectionBounds verify_projection_bounds(const ProjectionStack& stack, Discretization& disc, int trials,
                                          std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("verify_projection_bounds needs at least one trial");
  const int K = stack.fine_scale();
  const double h_k = disc.at(stack.coarse_scale()).mesh->h();
  std::mt19937_64 rng(mix_seed(seed, 0x70726f6aULL));
  std::normal_distribution<double> normal;
  ProjectionBounds bounds;
  bounds.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    Vector v(stack.fine().size());
    for (auto& x : v) x = normal(rng);
    const double norm = disc.h_norm(K, v);
    if (norm == 0.0) continue;
    const Vector pv = stack.prolong() * (stack.pi_k() * v);
    bounds.max_stability = std::max(bounds.max_stability, disc.h_norm(K, pv) / norm);
    bounds.max_approximation = std::max(bounds.max_approximation, l2_norm(stack.fine(), v - pv) / (h_k * norm));
  }
  return bounds;
}

}  // namespace fracfem
