#include "fracfem/lattice.hpp"

#include <bit>
#include <stdexcept>

namespace fracfem {

namespace {

std::int64_t shift_exact(std::int64_t v, int shift) {
  if (shift >= 0) return v * (std::int64_t{1} << shift);
  const std::int64_t den = std::int64_t{1} << (-shift);
  if (v % den != 0) throw std::invalid_argument("lattice point not representable at coarser resolution");
  return v / den;
}

}  // namespace

LatticePoint rescale(LatticePoint p, int from_log2, int to_log2) {
  const int shift = to_log2 - from_log2;
  return {shift_exact(p.x, shift), shift_exact(p.y, shift)};
}

bool representable(LatticePoint p, int from_log2, int to_log2) {
  if (to_log2 >= from_log2) return true;
  const std::int64_t den = std::int64_t{1} << (from_log2 - to_log2);
  return p.x % den == 0 && p.y % den == 0;
}

Point to_point(LatticePoint p, int log2_den) {
  const double scale = 1.0 / static_cast<double>(std::int64_t{1} << log2_den);
  return {static_cast<double>(p.x) * scale, static_cast<double>(p.y) * scale};
}

std::string dyadic_string(std::int64_t n, int log2_den) {
  if (n == 0) return "0";
  std::int64_t den = std::int64_t{1} << log2_den;
  while (den > 1 && n % 2 == 0) {
    n /= 2;
    den /= 2;
  }
  if (den == 1) return std::to_string(n);
  return std::to_string(n) + "/" + std::to_string(den);
}

std::int64_t parse_dyadic(const std::string& text, int target_log2) {
  const auto slash = text.find('/');
  const std::int64_t num = std::stoll(text.substr(0, slash));
  std::int64_t den = 1;
  if (slash != std::string::npos) den = std::stoll(text.substr(slash + 1));
  if (den <= 0 || !std::has_single_bit(static_cast<std::uint64_t>(den)))
    throw std::invalid_argument("denominator must be a power of two: " + text);
  const int den_log2 = std::countr_zero(static_cast<std::uint64_t>(den));
  return rescale({num, 0}, den_log2, target_log2).x;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace fracfem
