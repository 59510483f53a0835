#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace fracfem {

/// Point of the unit square in floating point.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Dyadic point: integer numerators over a power-of-two denominator that is
/// owned by the enclosing object (mesh level or network resolution).
struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  auto operator<=>(const LatticePoint&) const = default;
};

/// Segment between two lattice points, canonicalized so that a < b.
struct LatticeEdge {
  LatticePoint a;
  LatticePoint b;

  LatticeEdge() = default;
  LatticeEdge(LatticePoint p, LatticePoint q) : a(p < q ? p : q), b(p < q ? q : p) {}

  auto operator<=>(const LatticeEdge&) const = default;
};

/// Moves a point from denominator 2^from to 2^to. Throws if the point is not
/// representable at the target resolution.
LatticePoint rescale(LatticePoint p, int from_log2, int to_log2);

/// True if p can be written exactly over 2^to_log2.
bool representable(LatticePoint p, int from_log2, int to_log2);

Point to_point(LatticePoint p, int log2_den);

/// Reduced "p/q" text form of n / 2^log2_den.
std::string dyadic_string(std::int64_t n, int log2_den);

/// Parses "p/q" or an integer; q must be a power of two. Returns numerator
/// over 2^target_log2.
std::int64_t parse_dyadic(const std::string& text, int target_log2);

/// Deterministic 64-bit mixer used to derive independent random sub-streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0,1) from a 64-bit engine output; bit-identical across
/// standard libraries.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace fracfem

template <>
struct std::hash<fracfem::LatticePoint> {
  std::size_t operator()(const fracfem::LatticePoint& p) const noexcept {
    return std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(p.x) * 0x9E3779B97F4A7C15ULL ^
                                      static_cast<std::uint64_t>(p.y));
  }
};
