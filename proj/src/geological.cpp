#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "fracfem/cells.hpp"
#include "fracfem/mesh.hpp"
#include "fracfem/network.hpp"

namespace fracfem {

namespace {

constexpr double kChordBias = 8.0;
constexpr int kSplitAttempts = 32;
constexpr int kCoarsestLevel = 4;

constexpr std::array<LatticePoint, 6> kSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}}};

std::int64_t dist2(LatticePoint a, LatticePoint b) {
  const std::int64_t dx = a.x - b.x;
  const std::int64_t dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Vertex classification of one mesh relative to the current cells.
struct VertexMap {
  std::int64_t n = 0;
  std::vector<int> interior_cell;  // cell whose interior holds the vertex, or -1
  std::vector<char> used;          // taken by a path of the current split

  std::size_t index(LatticePoint p) const { return static_cast<std::size_t>(p.y * (n + 1) + p.x); }
  bool inside(LatticePoint p) const { return p.x >= 0 && p.y >= 0 && p.x <= n && p.y <= n; }
};

class PathBuilder {
 public:
  PathBuilder(VertexMap& map, int cell, std::vector<LatticePoint> interior)
      : map_(map), cell_(cell), interior_(std::move(interior)) {}

  // Random walk from `start` to `target` over free interior vertices. Each
  // step lowers the pair (hop distance to the target inside the free region,
  // Euclidean distance), so the walk ends at the target whenever the target
  // is reachable. Steps are biased toward the chord. Returns an empty path if
  // the target is cut off.
  std::vector<LatticePoint> walk(LatticePoint start, LatticePoint target, std::mt19937_64& rng) {
    const std::vector<int> hops = hop_distances(target);
    auto rank = [&](LatticePoint p) {
      if (p == target) return 0;
      const std::size_t i = map_.index(p);
      if (map_.interior_cell[i] != cell_ || map_.used[i]) return -1;
      return hops[slot(p)];
    };

    int start_rank = -1;
    for (const auto& s : kSteps) {
      const LatticePoint w{start.x + s.x, start.y + s.y};
      if (!map_.inside(w)) continue;
      const int r = rank(w);
      if (r >= 0 && (start_rank < 0 || r + 1 < start_rank)) start_rank = r + 1;
    }
    if (start_rank < 0) return {};

    std::vector<LatticePoint> path{start};
    const double cx = static_cast<double>(target.x - start.x);
    const double cy = static_cast<double>(target.y - start.y);
    const double chord = std::hypot(cx, cy);
    const double h = std::sqrt(2.0);  // mesh size in lattice units

    std::vector<LatticePoint> options;
    std::vector<double> weights;
    int current = start_rank;
    while (path.back() != target) {
      const LatticePoint v = path.back();
      const std::int64_t dv = dist2(v, target);
      options.clear();
      weights.clear();
      for (const auto& s : kSteps) {
        const LatticePoint w{v.x + s.x, v.y + s.y};
        if (!map_.inside(w)) continue;
        const int r = rank(w);
        if (r < 0 || r > current || (r == current && dist2(w, target) >= dv)) continue;
        const double mx = 0.5 * static_cast<double>(v.x + w.x - 2 * start.x);
        const double my = 0.5 * static_cast<double>(v.y + w.y - 2 * start.y);
        const double off = chord > 0.0 ? std::abs(cx * my - cy * mx) / chord : 0.0;
        options.push_back(w);
        weights.push_back(std::exp(-kChordBias * off / h));
      }
      double total = 0.0;
      for (double w : weights) total += w;
      double pick = unit_double(rng()) * total;
      std::size_t chosen = 0;
      while (chosen + 1 < options.size() && pick >= weights[chosen]) pick -= weights[chosen++];
      path.push_back(options[chosen]);
      current = rank(options[chosen]);
    }
    return path;
  }

 private:
  std::size_t slot(LatticePoint p) const {
    return static_cast<std::size_t>(std::lower_bound(interior_.begin(), interior_.end(), p) - interior_.begin());
  }

  // Breadth-first hop counts from the target through free interior vertices.
  std::vector<int> hop_distances(LatticePoint target) const {
    std::vector<int> hops(interior_.size(), std::numeric_limits<int>::max());
    std::vector<LatticePoint> frontier{target};
    int depth = 0;
    while (!frontier.empty()) {
      ++depth;
      std::vector<LatticePoint> next;
      for (const auto& p : frontier) {
        for (const auto& s : kSteps) {
          const LatticePoint w{p.x + s.x, p.y + s.y};
          if (!map_.inside(w) || w == target) continue;
          const std::size_t i = map_.index(w);
          if (map_.interior_cell[i] != cell_ || map_.used[i]) continue;
          int& h = hops[slot(w)];
          if (h <= depth) continue;
          h = depth;
          next.push_back(w);
        }
      }
      frontier = std::move(next);
    }
    for (int& h : hops)
      if (h == std::numeric_limits<int>::max()) h = -1;
    return hops;
  }

  VertexMap& map_;
  int cell_;
  std::vector<LatticePoint> interior_;  // sorted
};

LatticePoint nearest(const std::vector<LatticePoint>& candidates, double x, double y) {
  LatticePoint best = candidates.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& p : candidates) {
    const double d = std::hypot(static_cast<double>(p.x) - x, static_cast<double>(p.y) - y);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

// Splits a cell into four by paths from its l, t, r, b anchors to its
// center. The anchors are the first cell-boundary vertices on the axis rays
// from the center, so the straight rays are always a valid split; they are
// used when every random attempt gets cut off.
std::vector<LatticeEdge> split_cell(VertexMap& map, int cell, LatticePoint center, std::vector<LatticePoint> interior,
                                    std::uint64_t seed, std::uint64_t stream) {
  constexpr std::array<LatticePoint, 4> kRays{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};
  std::array<std::vector<LatticePoint>, 4> rays;
  for (int a = 0; a < 4; ++a) {
    LatticePoint p = center;
    rays[a].push_back(p);
    do {
      p = {p.x + kRays[a].x, p.y + kRays[a].y};
      rays[a].push_back(p);
    } while (map.interior_cell[map.index(p)] == cell);
    std::reverse(rays[a].begin(), rays[a].end());
  }

  auto to_edges = [](const std::vector<LatticePoint>& path, std::vector<LatticeEdge>& out) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) out.emplace_back(path[i], path[i + 1]);
  };

  PathBuilder builder(map, cell, std::move(interior));
  for (int attempt = 0; attempt < kSplitAttempts; ++attempt) {
    std::mt19937_64 rng(mix_seed(seed, stream * kSplitAttempts + static_cast<std::uint64_t>(attempt)));
    std::vector<std::size_t> marked;
    std::vector<LatticeEdge> edges;
    bool ok = true;
    for (const auto& ray : rays) {
      const auto path = builder.walk(ray.front(), center, rng);
      if (path.empty()) {
        ok = false;
        break;
      }
      for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const std::size_t idx = map.index(path[i]);
        map.used[idx] = 1;
        marked.push_back(idx);
      }
      to_edges(path, edges);
    }
    for (std::size_t idx : marked) map.used[idx] = 0;
    if (ok) return edges;
  }
  std::vector<LatticeEdge> edges;
  for (const auto& ray : rays) to_edges(ray, edges);
  return edges;
}

}  // namespace

InterfaceNetwork build_geological_network(int k_max, std::uint64_t seed) {
  if (k_max < 1 || k_max > kMaxGeologicalDepth) throw std::invalid_argument("k_max out of range for the geological network");

  InterfaceNetwork net;
  net.kind = NetworkKind::geological;
  net.seed = seed;
  net.resolution_log2 = k_max + kCoarsestLevel - 1;
  net.scale_to_mesh.push_back(0);
  for (int k = 1; k <= k_max; ++k) net.scale_to_mesh.push_back(k + kCoarsestLevel - 1);

  MeshHierarchy hierarchy;
  for (int k = 1; k <= k_max; ++k) {
    const int fine_level = k + kCoarsestLevel - 1;
    const Triangulation& fine = hierarchy.at_level(fine_level);

    // Cells of Ω^(k-1) on the fine mesh; Γ^(k-1) is resolved there as well.
    InterfaceNetwork partial = net;
    partial.levels.resize(static_cast<std::size_t>(k - 1));
    partial.scale_to_mesh.resize(static_cast<std::size_t>(k));
    const auto edge_level = interface_edge_levels(partial, k - 1, fine);
    int count = 0;
    const auto label = label_components(fine, edge_level, count);

    // Only cells created at level k-1 are candidates: they border Γ_{k-1}.
    std::vector<char> fresh(static_cast<std::size_t>(count), k == 1 ? 1 : 0);
    for (std::size_t e = 0; e < fine.num_edges(); ++e)
      if (k > 1 && edge_level[e] == k - 1)
        for (int t : fine.edge_triangles[e])
          if (t >= 0) fresh[label[t]] = 1;

    VertexMap map;
    map.n = fine.cells_per_side();
    const std::size_t nv = static_cast<std::size_t>((map.n + 1) * (map.n + 1));
    map.interior_cell.assign(nv, -1);
    map.used.assign(nv, 0);
    std::vector<char> blocked(nv, 0);
    for (std::size_t e = 0; e < fine.num_edges(); ++e)
      if (edge_level[e] != 0)
        for (int v : fine.edges[e]) blocked[map.index(fine.vertices[v])] = 1;
    std::vector<int> first_label(nv, -1);
    std::vector<char> mixed(nv, 0);
    std::vector<std::vector<int>> cell_triangles(static_cast<std::size_t>(count));
    for (int t = 0; t < static_cast<int>(fine.num_triangles()); ++t) {
      cell_triangles[label[t]].push_back(t);
      for (int v : fine.triangles[t]) {
        const std::size_t i = map.index(fine.vertices[v]);
        if (first_label[i] < 0) first_label[i] = label[t];
        else if (first_label[i] != label[t]) mixed[i] = 1;
      }
    }
    for (int v = 0; v < static_cast<int>(fine.num_vertices()); ++v) {
      const std::size_t i = map.index(fine.vertices[v]);
      if (!mixed[i] && !blocked[i] && !fine.on_boundary(v)) map.interior_cell[i] = first_label[i];
    }

    std::vector<LatticeEdge> level_edges;
    const std::int64_t to_network = std::int64_t{1} << (net.resolution_log2 - fine_level);
    for (int c = 0; c < count; ++c) {
      if (!fresh[c]) continue;
      double ax = 0.0, ay = 0.0, area = 0.0;
      std::vector<LatticePoint> interior;
      for (int t : cell_triangles[c]) {
        const double a = fine.area(t);
        const Point p = fine.centroid(t);
        ax += a * p.x;
        ay += a * p.y;
        area += a;
        for (int v : fine.triangles[t]) {
          const LatticePoint q = fine.vertices[v];
          if (map.interior_cell[map.index(q)] == c) interior.push_back(q);
        }
      }
      std::sort(interior.begin(), interior.end());
      interior.erase(std::unique(interior.begin(), interior.end()), interior.end());
      if (interior.empty()) continue;
      const double scale = static_cast<double>(map.n);
      const LatticePoint center = nearest(interior, ax / area * scale, ay / area * scale);

      const std::uint64_t stream = (static_cast<std::uint64_t>(k) << 40) | static_cast<std::uint64_t>(c);
      if (k > 1) {
        std::mt19937_64 rng(mix_seed(seed, stream | (std::uint64_t{1} << 39)));
        const double xi = 1.0 - std::sqrt(1.0 - unit_double(rng()));  // density 2(1 - ξ)
        const double m = std::min(static_cast<double>(center.x), static_cast<double>(center.y)) / scale;
        if (!(xi > m)) continue;
      }
      for (const auto& e : split_cell(map, c, center, interior, seed, stream))
        level_edges.emplace_back(LatticePoint{e.a.x * to_network, e.a.y * to_network},
                                 LatticePoint{e.b.x * to_network, e.b.y * to_network});
    }
    std::sort(level_edges.begin(), level_edges.end());
    net.levels.push_back(std::move(level_edges));
  }
  return net;
}

}  // namespace fracfem
