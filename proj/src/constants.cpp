#include "fracfem/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fracfem/cells.hpp"
#include "fracfem/mesh.hpp"

namespace fracfem {

double NetworkConstants::jump_weight(int j) const { return std::pow(1.0 + c_frak, j) * C.at(j); }

bool NetworkConstants::small_cell_condition(int k) const {
  const double lhs = r.at(k) * std::pow(1.0 + c_frak, -k);
  return std::isfinite(lhs) && lhs <= d.at(k);
}

double NetworkConstants::locality_sum(int k) const {
  double sum = 0.0;
  for (int l = 1; l <= k; ++l) sum += jump_weight(l);
  return d.at(k) * sum;
}

bool NetworkConstants::locality_condition(double bound) const {
  for (int k = 1; k <= depth(); ++k)
    if (locality_sum(k) > bound) return false;
  return true;
}

bool NetworkConstants::self_similarity_condition() const {
  for (int k = 1; k <= depth(); ++k)
    if (!(r[k] * C[k] <= self_similarity)) return false;
  return true;
}

namespace {

Point perimeter_point(double s) {
  if (s < 1.0) return {s, 0.0};
  if (s < 2.0) return {1.0, s - 1.0};
  if (s < 3.0) return {3.0 - s, 1.0};
  return {0.0, 4.0 - s};
}

double orient(Point a, Point b, Point c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

bool crosses(Point p, Point q, Point a, Point b) {
  const double o1 = orient(p, q, a);
  const double o2 = orient(p, q, b);
  const double o3 = orient(a, b, p);
  const double o4 = orient(a, b, q);
  return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

}  // namespace

double estimate_Cj(const InterfaceNetwork& network, int j, const ChordEstimateOptions& options) {
  if (j < 1 || j > network.depth()) return 0.0;
  std::vector<std::pair<Point, Point>> segments;
  for (const auto& e : network.level(j)) segments.emplace_back(network.to_point(e.a), network.to_point(e.b));
  if (segments.empty()) return 0.0;

  std::mt19937_64 rng(mix_seed(options.seed, static_cast<std::uint64_t>(j)));
  int best = 0;
  for (int line = 0; line < options.n_lines; ++line) {
    const Point p = perimeter_point(4.0 * unit_double(rng()));
    const Point q = perimeter_point(4.0 * unit_double(rng()));
    int count = 0;
    for (const auto& [a, b] : segments)
      if (crosses(p, q, a, b)) ++count;
    best = std::max(best, count);
  }
  return static_cast<double>(best);
}

NetworkConstants constants_for(const InterfaceNetwork& network, double c_frak, LocalizedConstants localized,
                               const ChordEstimateOptions& chords) {
  NetworkConstants out;
  out.c_frak = c_frak;
  const int depth = network.depth();
  out.C.assign(static_cast<std::size_t>(depth + 1), 0.0);
  out.d.assign(static_cast<std::size_t>(depth + 1), 0.0);
  out.r.assign(static_cast<std::size_t>(depth + 1), std::numeric_limits<double>::quiet_NaN());

  if (network.kind == NetworkKind::localized) {
    for (int k = 0; k <= depth; ++k) {
      const double p = std::pow(2.0, k);
      if (k >= 1) {
        out.C[k] = localized == LocalizedConstants::power_of_two ? p : p + 0.5 * p - 2.0;
        out.r[k] = 2.0 / p;
      }
      out.d[k] = std::sqrt(2.0) * std::pow(4.0, -k);
    }
    return out;
  }

  for (int j = 1; j <= depth; ++j) out.C[j] = estimate_Cj(network, j, chords);
  MeshHierarchy hierarchy(network.scale_to_mesh);
  for (int k = 0; k < depth; ++k) {
    const auto partition = extract_cells(network, k, hierarchy.at_scale(k));
    out.d[k] = partition.diameter_bound;
  }
  return out;
}

}  // namespace fracfem
