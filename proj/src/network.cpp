#include "fracfem/network.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fracfem {

std::string to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::localized: return "localized";
    case NetworkKind::geological: return "geological";
    case NetworkKind::custom: return "custom";
  }
  return "custom";
}

NetworkKind network_kind_from_string(const std::string& text) {
  if (text == "localized") return NetworkKind::localized;
  if (text == "geological") return NetworkKind::geological;
  if (text == "custom") return NetworkKind::custom;
  throw std::invalid_argument("unknown network kind: " + text);
}

double InterfaceNetwork::length(int j) const {
  double total = 0.0;
  for (const auto& e : level(j)) {
    const Point a = to_point(e.a);
    const Point b = to_point(e.b);
    total += std::hypot(b.x - a.x, b.y - a.y);
  }
  return total;
}

std::vector<LatticeEdge> subdivide(const std::vector<LatticeEdge>& edges, int resolution_log2, int unit_log2) {
  if (unit_log2 > resolution_log2) throw std::invalid_argument("unit finer than network resolution");
  const std::int64_t step = std::int64_t{1} << (resolution_log2 - unit_log2);
  std::vector<LatticeEdge> out;
  for (const auto& e : edges) {
    const std::int64_t dx = e.b.x - e.a.x;
    const std::int64_t dy = e.b.y - e.a.y;
    const std::int64_t len = std::max(std::abs(dx), std::abs(dy));
    if (len % step != 0 || dx % len != 0 || dy % len != 0)
      throw std::invalid_argument("edge not aligned with the unit lattice");
    const std::int64_t n = len / step;
    const std::int64_t sx = dx / n;
    const std::int64_t sy = dy / n;
    LatticePoint p = e.a;
    for (std::int64_t i = 0; i < n; ++i) {
      const LatticePoint q{p.x + sx, p.y + sy};
      out.emplace_back(p, q);
      p = q;
    }
  }
  return out;
}

std::vector<LatticeEdge> unit_edges(const InterfaceNetwork& network, int j) {
  auto out = subdivide(network.level(j), network.resolution_log2, network.resolution_log2);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool levels_disjoint(const InterfaceNetwork& network) {
  std::set<LatticeEdge> seen;
  // Lattice squares crossed by a (1,1) and a (1,-1) unit diagonal of different levels.
  std::set<std::pair<LatticePoint, int>> diagonals;
  for (int j = 1; j <= network.depth(); ++j) {
    const auto edges = unit_edges(network, j);
    for (const auto& e : edges)
      if (seen.count(e)) return false;
    for (const auto& e : edges) {
      seen.insert(e);
      const std::int64_t dx = e.b.x - e.a.x;
      const std::int64_t dy = e.b.y - e.a.y;
      if (dx != 0 && dy != 0) {
        const LatticePoint corner{std::min(e.a.x, e.b.x), std::min(e.a.y, e.b.y)};
        const int orientation = (dx * dy > 0) ? 1 : -1;
        if (diagonals.count({corner, -orientation})) return false;
        diagonals.insert({corner, orientation});
      }
    }
  }
  return true;
}

InterfaceNetwork make_custom_network(std::vector<std::vector<LatticeEdge>> levels, int resolution_log2,
                                     std::vector<int> scale_to_mesh) {
  InterfaceNetwork net;
  net.kind = NetworkKind::custom;
  net.resolution_log2 = resolution_log2;
  net.levels = std::move(levels);
  net.scale_to_mesh = std::move(scale_to_mesh);
  if (static_cast<int>(net.scale_to_mesh.size()) != net.depth() + 1)
    throw std::invalid_argument("scale_to_mesh needs one entry per scale 0..depth");
  return net;
}

InterfaceNetwork build_localized_network(int k_max, int max_depth) {
  if (k_max < 1 || k_max > max_depth) throw std::invalid_argument("k_max out of range for the localized network");

  // Γ_1 on the lattice of spacing 1/4.
  std::vector<std::vector<LatticeEdge>> levels;  // level j stored over 4^j
  levels.push_back(subdivide({{{1, 0}, {1, 4}}, {{0, 1}, {4, 1}}, {{2, 0}, {2, 1}}, {{0, 2}, {1, 2}}}, 2, 2));

  for (int k = 1; k < k_max; ++k) {
    // Γ^(k) as unit edges over 4^k; `existing` holds the same set over 4^(k+1).
    std::vector<LatticeEdge> current;
    for (int j = 1; j <= k; ++j) {
      const std::int64_t scale = std::int64_t{1} << (2 * (k - j));
      for (const auto& e : levels[j - 1])
        current.emplace_back(LatticePoint{e.a.x * scale, e.a.y * scale}, LatticePoint{e.b.x * scale, e.b.y * scale});
    }
    current = subdivide(current, 2 * k, 2 * k);
    std::set<LatticeEdge> existing;
    for (const auto& e : current) {
      const LatticePoint a{4 * e.a.x, 4 * e.a.y};
      const LatticePoint b{4 * e.b.x, 4 * e.b.y};
      for (const auto& u : subdivide({{a, b}}, 2 * k + 2, 2 * k + 2)) existing.insert(u);
    }
    // ¼(Γ^(k) ∪ (e1 + Γ^(k)) ∪ (e2 + Γ^(k))): same integers, denominator 4^(k+1).
    const std::int64_t one = std::int64_t{1} << (2 * k);
    std::set<LatticeEdge> next;
    for (const auto& e : current) {
      for (const LatticePoint shift : {LatticePoint{0, 0}, LatticePoint{one, 0}, LatticePoint{0, one}}) {
        const LatticeEdge moved({e.a.x + shift.x, e.a.y + shift.y}, {e.b.x + shift.x, e.b.y + shift.y});
        if (!existing.count(moved)) next.insert(moved);
      }
    }
    levels.emplace_back(next.begin(), next.end());
  }

  InterfaceNetwork net;
  net.kind = NetworkKind::localized;
  net.resolution_log2 = 2 * k_max;
  for (int j = 1; j <= k_max; ++j) {
    const std::int64_t scale = std::int64_t{1} << (2 * (k_max - j));
    std::vector<LatticeEdge> level;
    level.reserve(levels[j - 1].size());
    for (const auto& e : levels[j - 1])
      level.emplace_back(LatticePoint{e.a.x * scale, e.a.y * scale}, LatticePoint{e.b.x * scale, e.b.y * scale});
    std::sort(level.begin(), level.end());
    net.levels.push_back(std::move(level));
  }
  for (int k = 0; k <= k_max; ++k) net.scale_to_mesh.push_back(2 * k);
  return net;
}

void write_network(std::ostream& out, const InterfaceNetwork& network) {
  out << "# fracfem interface network\n";
  out << "kind " << to_string(network.kind) << "\n";
  out << "seed " << network.seed << "\n";
  out << "k_max " << network.depth() << "\n";
  out << "resolution " << (std::int64_t{1} << network.resolution_log2) << "\n";
  out << "scale_to_mesh";
  for (int m : network.scale_to_mesh) out << ' ' << m;
  out << "\n";
  std::size_t count = 0;
  for (const auto& level : network.levels) count += level.size();
  out << "edges " << count << "\n";
  const int r = network.resolution_log2;
  for (int j = 1; j <= network.depth(); ++j)
    for (const auto& e : network.level(j))
      out << j << ' ' << dyadic_string(e.a.x, r) << ' ' << dyadic_string(e.a.y, r) << ' '
          << dyadic_string(e.b.x, r) << ' ' << dyadic_string(e.b.y, r) << "\n";
}

InterfaceNetwork read_network(std::istream& in) {
  InterfaceNetwork net;
  std::string line;
  std::size_t expected = 0;
  int depth = -1;
  bool in_edges = false;
  std::size_t read_count = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!in_edges) {
      std::string key;
      ls >> key;
      if (key == "kind") {
        std::string v;
        ls >> v;
        net.kind = network_kind_from_string(v);
      } else if (key == "seed") {
        ls >> net.seed;
      } else if (key == "k_max") {
        ls >> depth;
        net.levels.assign(static_cast<std::size_t>(depth), {});
      } else if (key == "resolution") {
        std::int64_t den = 0;
        ls >> den;
        net.resolution_log2 = 0;
        while ((std::int64_t{1} << net.resolution_log2) < den) ++net.resolution_log2;
        if ((std::int64_t{1} << net.resolution_log2) != den)
          throw std::invalid_argument("resolution must be a power of two");
      } else if (key == "scale_to_mesh") {
        int m = 0;
        while (ls >> m) net.scale_to_mesh.push_back(m);
      } else if (key == "edges") {
        ls >> expected;
        in_edges = true;
      } else {
        throw std::invalid_argument("unknown network header key: " + key);
      }
      continue;
    }
    int j = 0;
    std::string x1, y1, x2, y2;
    if (!(ls >> j >> x1 >> y1 >> x2 >> y2)) throw std::invalid_argument("malformed edge line: " + line);
    if (j < 1 || j > depth) throw std::invalid_argument("edge level out of range: " + line);
    const int r = net.resolution_log2;
    net.levels[static_cast<std::size_t>(j - 1)].emplace_back(
        LatticePoint{parse_dyadic(x1, r), parse_dyadic(y1, r)}, LatticePoint{parse_dyadic(x2, r), parse_dyadic(y2, r)});
    ++read_count;
  }
  if (depth < 0 || !in_edges) throw std::invalid_argument("network header incomplete");
  if (read_count != expected) throw std::invalid_argument("edge count mismatch");
  if (static_cast<int>(net.scale_to_mesh.size()) != depth + 1)
    throw std::invalid_argument("scale_to_mesh needs one entry per scale");
  return net;
}

std::uint64_t network_hash(const InterfaceNetwork& network) {
  std::ostringstream text;
  write_network(text, network);
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : text.str()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace fracfem
