#pragma once

#include <cstdint>
#include <vector>

#include "fracfem/network.hpp"

namespace fracfem {

/// Per-level jump constants of the localized network: C_k = 2^k (default) or
/// C_k = 2^k + 2^(k-1) - 2.
enum class LocalizedConstants { power_of_two, shifted };

/// Geometric constants of a network and the derived jump weights.
struct NetworkConstants {
  double c_frak = 1.0;
  std::vector<double> C;  // C[j], j = 1..depth; C[0] unused
  std::vector<double> d;  // d[k], k = 0..depth
  std::vector<double> r;  // r[k], k = 1..depth; r[0] unused
  double self_similarity = 3.0;  // C_0 with r_k C_k <= C_0
  int neighbor_bound = 6;        // c_N

  int depth() const { return static_cast<int>(C.size()) - 1; }

  /// (1 + c)^j C_j
  double jump_weight(int j) const;
  /// r_k (1 + c)^(-k) <= d_k
  bool small_cell_condition(int k) const;
  /// d_k sum_{l<=k} (1 + c)^l C_l
  double locality_sum(int k) const;
  /// locality_sum(k) <= bound for all k = 1..depth
  bool locality_condition(double bound) const;
  /// r_k C_k <= C_0 for all k
  bool self_similarity_condition() const;
};

struct ChordEstimateOptions {
  int n_lines = 10000;
  std::uint64_t seed = 0;
};

/// Largest number of crossings of Γ_j by a random chord of Ω (endpoints
/// uniform on ∂Ω) over n_lines chords. Increasing n_lines extends the same
/// chord sequence.
double estimate_Cj(const InterfaceNetwork& network, int j, const ChordEstimateOptions& options = {});

/// Closed form for the localized network, estimated C_j and measured d_k
/// otherwise.
NetworkConstants constants_for(const InterfaceNetwork& network, double c_frak,
                               LocalizedConstants localized = LocalizedConstants::power_of_two,
                               const ChordEstimateOptions& chords = {});

}  // namespace fracfem
