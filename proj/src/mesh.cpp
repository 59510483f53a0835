#include "fracfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "fracfem/network.hpp"

namespace fracfem {

namespace {

// Direction index of a lattice step (dx, dy) with a < b: 0 = (1,0), 1 = (0,1), 2 = (1,1).
int direction_of(std::int64_t dx, std::int64_t dy) {
  if (dx == 1 && dy == 0) return 0;
  if (dx == 0 && dy == 1) return 1;
  if (dx == 1 && dy == 1) return 2;
  return -1;
}

}  // namespace

double Triangulation::h() const { return std::sqrt(2.0) / static_cast<double>(cells_per_side()); }

Point Triangulation::centroid(int t) const {
  const auto& tri = triangles[t];
  Point c;
  for (int i = 0; i < 3; ++i) {
    const Point p = coords(tri[i]);
    c.x += p.x / 3.0;
    c.y += p.y / 3.0;
  }
  return c;
}

double Triangulation::area(int t) const {
  const auto& tri = triangles[t];
  const LatticePoint& a = vertices[tri[0]];
  const LatticePoint& b = vertices[tri[1]];
  const LatticePoint& c = vertices[tri[2]];
  const std::int64_t twice = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  const double n = static_cast<double>(cells_per_side());
  return 0.5 * static_cast<double>(twice) / (n * n);
}

bool Triangulation::on_boundary(int v) const {
  const auto& p = vertices[v];
  const std::int64_t n = cells_per_side();
  return p.x == 0 || p.y == 0 || p.x == n || p.y == n;
}

int Triangulation::find_vertex(LatticePoint p, int log2_den) const {
  if (!representable(p, log2_den, level)) return -1;
  const LatticePoint q = rescale(p, log2_den, level);
  const std::int64_t n = cells_per_side();
  if (q.x < 0 || q.y < 0 || q.x > n || q.y > n) return -1;
  return vertex_lookup_[static_cast<std::size_t>(q.y * (n + 1) + q.x)];
}

int Triangulation::find_edge(int v0, int v1) const {
  LatticePoint a = vertices[v0];
  LatticePoint b = vertices[v1];
  if (b < a) std::swap(a, b);
  const int dir = direction_of(b.x - a.x, b.y - a.y);
  if (dir < 0) return -1;
  const std::int64_t n = cells_per_side();
  return edge_lookup_[static_cast<std::size_t>((a.y * (n + 1) + a.x) * 3 + dir)];
}

int Triangulation::locate(Point p) const {
  const std::int64_t n = cells_per_side();
  const double sx = p.x * static_cast<double>(n);
  const double sy = p.y * static_cast<double>(n);
  std::int64_t i = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(sx)), 0, n - 1);
  std::int64_t j = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(sy)), 0, n - 1);
  const int upper = (sy - static_cast<double>(j)) > (sx - static_cast<double>(i)) ? 1 : 0;
  return square_lookup_[static_cast<std::size_t>(2 * (j * n + i) + upper)];
}

void Triangulation::finalize() {
  const std::int64_t n = cells_per_side();
  vertex_lookup_.assign(static_cast<std::size_t>((n + 1) * (n + 1)), -1);
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const auto& p = vertices[v];
    vertex_lookup_[static_cast<std::size_t>(p.y * (n + 1) + p.x)] = static_cast<int>(v);
  }

  edges.clear();
  edge_triangles.clear();
  edge_lookup_.assign(static_cast<std::size_t>((n + 1) * (n + 1) * 3), -1);
  triangle_edges.assign(triangles.size(), {-1, -1, -1});
  square_lookup_.assign(static_cast<std::size_t>(2 * n * n), -1);

  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    for (int i = 0; i < 3; ++i) {
      int v0 = tri[i];
      int v1 = tri[(i + 1) % 3];
      LatticePoint a = vertices[v0];
      LatticePoint b = vertices[v1];
      if (b < a) {
        std::swap(a, b);
        std::swap(v0, v1);
      }
      const int dir = direction_of(b.x - a.x, b.y - a.y);
      if (dir < 0) throw std::logic_error("triangle edge is not a lattice step");
      auto& slot = edge_lookup_[static_cast<std::size_t>((a.y * (n + 1) + a.x) * 3 + dir)];
      if (slot < 0) {
        slot = static_cast<int>(edges.size());
        edges.push_back({v0, v1});
        edge_triangles.push_back({static_cast<int>(t), -1});
      } else {
        edge_triangles[slot][1] = static_cast<int>(t);
      }
      triangle_edges[t][i] = slot;
    }
    // lower-left lattice corner of the triangle and which half it covers
    const auto& p0 = vertices[tri[0]];
    const auto& p1 = vertices[tri[1]];
    const auto& p2 = vertices[tri[2]];
    const std::int64_t i0 = std::min({p0.x, p1.x, p2.x});
    const std::int64_t j0 = std::min({p0.y, p1.y, p2.y});
    const std::int64_t cx = p0.x + p1.x + p2.x - 3 * i0;  // 3 * centroid offset
    const std::int64_t cy = p0.y + p1.y + p2.y - 3 * j0;
    square_lookup_[static_cast<std::size_t>(2 * (j0 * n + i0) + (cy > cx ? 1 : 0))] = static_cast<int>(t);
  }
}

Triangulation base_mesh() {
  Triangulation mesh;
  mesh.level = 0;
  mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  mesh.parent_triangle = {-1, -1};
  mesh.finalize();
  return mesh;
}

Triangulation refine_uniform(const Triangulation& coarse) {
  Triangulation fine;
  fine.level = coarse.level + 1;
  const std::int64_t n = fine.cells_per_side();
  std::vector<int> lookup(static_cast<std::size_t>((n + 1) * (n + 1)), -1);
  auto vertex_at = [&](LatticePoint p) {
    auto& slot = lookup[static_cast<std::size_t>(p.y * (n + 1) + p.x)];
    if (slot < 0) {
      slot = static_cast<int>(fine.vertices.size());
      fine.vertices.push_back(p);
    }
    return slot;
  };
  fine.vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (const auto& p : coarse.vertices) vertex_at({2 * p.x, 2 * p.y});

  fine.triangles.reserve(coarse.triangles.size() * 4);
  fine.parent_triangle.reserve(coarse.triangles.size() * 4);
  for (std::size_t t = 0; t < coarse.triangles.size(); ++t) {
    const auto& tri = coarse.triangles[t];
    const LatticePoint& a = coarse.vertices[tri[0]];
    const LatticePoint& b = coarse.vertices[tri[1]];
    const LatticePoint& c = coarse.vertices[tri[2]];
    const int va = tri[0];
    const int vb = tri[1];
    const int vc = tri[2];
    const int mab = vertex_at({a.x + b.x, a.y + b.y});
    const int mbc = vertex_at({b.x + c.x, b.y + c.y});
    const int mca = vertex_at({c.x + a.x, c.y + a.y});
    fine.triangles.push_back({va, mab, mca});
    fine.triangles.push_back({mab, vb, mbc});
    fine.triangles.push_back({mca, mbc, vc});
    fine.triangles.push_back({mab, mbc, mca});
    for (int i = 0; i < 4; ++i) fine.parent_triangle.push_back(static_cast<int>(t));
  }
  fine.finalize();
  return fine;
}

std::vector<int> interface_edge_levels(const InterfaceNetwork& network, int k, const Triangulation& mesh) {
  std::vector<int> result(mesh.num_edges(), 0);
  if (k > network.depth()) throw std::invalid_argument("scale exceeds network depth");
  for (int j = 1; j <= k; ++j) {
    for (const auto& e : network.level(j)) {
      if (!representable(e.a, network.resolution_log2, mesh.level) ||
          !representable(e.b, network.resolution_log2, mesh.level))
        throw std::invalid_argument("mesh does not resolve interface level " + std::to_string(j));
      const LatticePoint a = rescale(e.a, network.resolution_log2, mesh.level);
      const LatticePoint b = rescale(e.b, network.resolution_log2, mesh.level);
      const std::int64_t dx = b.x - a.x;
      const std::int64_t dy = b.y - a.y;
      const std::int64_t steps = std::max(std::abs(dx), std::abs(dy));
      if (steps == 0 || dx % steps != 0 || dy % steps != 0)
        throw std::invalid_argument("interface edge is not along a lattice direction");
      LatticePoint p = a;
      for (std::int64_t s = 0; s < steps; ++s) {
        const LatticePoint q{p.x + dx / steps, p.y + dy / steps};
        const int v0 = mesh.find_vertex(p, mesh.level);
        const int v1 = mesh.find_vertex(q, mesh.level);
        const int edge = (v0 < 0 || v1 < 0) ? -1 : mesh.find_edge(v0, v1);
        if (edge < 0) throw std::invalid_argument("interface edge is not a union of mesh edges");
        if (result[edge] == 0) result[edge] = j;
        p = q;
      }
    }
  }
  return result;
}

bool check_resolution(const InterfaceNetwork& network, int k, const Triangulation& mesh) {
  try {
    interface_edge_levels(network, k, mesh);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

MeshHierarchy::MeshHierarchy(std::vector<int> scale_to_mesh) : scale_to_mesh(std::move(scale_to_mesh)) {}

std::shared_ptr<const Triangulation> MeshHierarchy::shared_at_level(int level) {
  if (level < 0) throw std::invalid_argument("negative refinement level");
  if (meshes_.empty()) meshes_.push_back(std::make_shared<const Triangulation>(base_mesh()));
  while (static_cast<int>(meshes_.size()) <= level) {
    if (!meshes_.back()) throw std::logic_error("mesh hierarchy was released below the requested level");
    meshes_.push_back(std::make_shared<const Triangulation>(refine_uniform(*meshes_.back())));
  }
  if (!meshes_[level]) throw std::logic_error("mesh level was released");
  return meshes_[level];
}

const Triangulation& MeshHierarchy::at_level(int level) { return *shared_at_level(level); }

void MeshHierarchy::release_above(int level) {
  if (static_cast<int>(meshes_.size()) > level + 1) meshes_.resize(static_cast<std::size_t>(level + 1));
}

void write_mesh(std::ostream& out, const Triangulation& mesh) {
  out << "# fracfem mesh, refinement level " << mesh.level << "\n";
  out << "vertices " << mesh.num_vertices() << "\n";
  out.precision(17);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point p = mesh.coords(static_cast<int>(v));
    out << p.x << ' ' << p.y << "\n";
  }
  out << "triangles " << mesh.num_triangles() << "\n";
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
}

}  // namespace fracfem
