#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracfem/lattice.hpp"

namespace fracfem {

enum class NetworkKind { localized, geological, custom };

std::string to_string(NetworkKind kind);
NetworkKind network_kind_from_string(const std::string& text);

/// Leveled interface network Γ_1, Γ_2, ... on the unit square.
///
/// Level j is stored as lattice edges in units of 2^-resolution_log2. Edges
/// run horizontally, vertically or along the (1,1) diagonal, so they are
/// unions of edges of every mesh that is fine enough. The builders below store
/// each Γ_j as unit edges of its resolving mesh T^(j).
class InterfaceNetwork {
 public:
  NetworkKind kind = NetworkKind::custom;
  std::uint64_t seed = 0;
  int resolution_log2 = 0;
  std::vector<std::vector<LatticeEdge>> levels;  // levels[j-1] is Γ_j
  std::vector<int> scale_to_mesh;                // refinement level of T^(k), k = 0..depth()

  int depth() const { return static_cast<int>(levels.size()); }
  const std::vector<LatticeEdge>& level(int j) const { return levels.at(j - 1); }
  int mesh_level(int k) const { return scale_to_mesh.at(k); }
  Point to_point(LatticePoint p) const { return fracfem::to_point(p, resolution_log2); }

  /// Number of stored edges of Γ_j.
  std::size_t edge_count(int j) const { return level(j).size(); }
  /// Total length of Γ_j.
  double length(int j) const;
};

inline constexpr int kMaxLocalizedDepth = 6;
inline constexpr int kMaxGeologicalDepth = 6;

/// Highly localized self-similar network: Γ_1 is the four explicit segments,
/// Γ_{k+1} = ¼(Γ^(k) ∪ (e1 + Γ^(k)) ∪ (e2 + Γ^(k))) \ Γ^(k). T^(k) is 2k
/// red refinements of the base mesh.
InterfaceNetwork build_localized_network(int k_max, int max_depth = kMaxLocalizedDepth);

/// Seeded random "crystalline" network: every refined cell is split by four
/// edge paths from the midpoints of its bounding sides to its center. T^(1)
/// is 4 refinements of the base mesh, each further level adds one.
InterfaceNetwork build_geological_network(int k_max, std::uint64_t seed);

/// Network with explicit levels, mostly for tests.
InterfaceNetwork make_custom_network(std::vector<std::vector<LatticeEdge>> levels, int resolution_log2,
                                     std::vector<int> scale_to_mesh);

/// Splits every edge into unit steps of length 2^-unit_log2 (in network units).
std::vector<LatticeEdge> subdivide(const std::vector<LatticeEdge>& edges, int resolution_log2,
                                   int unit_log2);

/// Unit edges of Γ_j at the finest stored lattice, sorted.
std::vector<LatticeEdge> unit_edges(const InterfaceNetwork& network, int j);

/// Pairwise disjointness of the levels as point sets (shared unit edges or
/// crossing interiors).
bool levels_disjoint(const InterfaceNetwork& network);

/// Text format:
///   # fracfem interface network
///   kind <localized|geological|custom>
///   seed <n>
///   k_max <depth>
///   resolution <2^r>
///   scale_to_mesh <m_0> ... <m_depth>
///   edges <count>
///   j x1 y1 x2 y2        (coordinates as reduced p/q)
void write_network(std::ostream& out, const InterfaceNetwork& network);
InterfaceNetwork read_network(std::istream& in);

/// Stable 64-bit fingerprint of the edge sets and header data.
std::uint64_t network_hash(const InterfaceNetwork& network);

}  // namespace fracfem
