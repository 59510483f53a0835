#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "fracfem/discretization.hpp"
#include "fracfem/harness.hpp"

namespace fracfem::testing {

inline Discretization localized(int k_max, double c = 1.0) {
  InterfaceNetwork network = build_localized_network(k_max);
  NetworkConstants constants = constants_for(network, c);
  return Discretization(std::move(network), std::move(constants), Coefficients::unit());
}

inline Vector random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fracfem-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fracfem::testing
