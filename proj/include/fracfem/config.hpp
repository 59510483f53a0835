#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fracfem/assembly.hpp"
#include "fracfem/constants.hpp"
#include "fracfem/network.hpp"
#include "fracfem/twolevel.hpp"

namespace fracfem {

enum class StudyKind { twolevel, lod, projections };

std::string to_string(StudyKind study);
std::string to_string(CellOrder order);

/// Everything a run depends on. Text form is `key = value` per line with `#`
/// comments; see presets/ for the full key list.
struct ExperimentConfig {
  // network
  NetworkKind network = NetworkKind::localized;
  std::uint64_t seed = 1;
  int k_max = 4;
  double c_frak = 1.0;
  LocalizedConstants localized_constants = LocalizedConstants::power_of_two;
  int chord_lines = 10000;
  // coefficients: A identity | diag:a,b ; B one | const:b ; f one | zero | sine | linear
  std::string a_mode = "identity";
  std::string b_mode = "one";
  std::string f_mode = "one";
  // study
  StudyKind study = StudyKind::twolevel;
  int K_first = 2;
  int K_last = 4;
  // two-level
  int coarse_scale = 1;
  int sweeps = 9;
  CellOrder order = CellOrder::descending;
  bool symmetric = false;
  double reference_tol = 1e-12;
  // lod
  int lod_K = 3;
  std::vector<int> lod_k{1, 2};
  std::vector<int> lod_nu{0, 1, 2, 3, 4, -1};  // -1: ideal
  double omega = 1.0 / 7.0;
  // projections
  std::vector<std::pair<int, int>> projection_pairs{{2, 1}, {3, 1}, {3, 2}};
  int projection_trials = 100;
  // output
  std::string out_dir = "out";
  std::string cache_dir;  // empty: <out_dir>/cache
  int threads = 1;

  std::vector<int> K_values() const;
  std::filesystem::path cache_path() const;
};

/// Applies one `key = value` assignment; throws std::invalid_argument on
/// unknown keys or malformed values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Directory searched by find_preset (compiled-in default, overridable by
/// FRACFEM_PRESETS).
std::filesystem::path preset_directory();
std::filesystem::path find_preset(const std::string& name);

/// Throws std::invalid_argument naming the first offending field.
void validate(const ExperimentConfig& config);

/// Canonical text form; parse_config(serialize(c)) == c.
std::string serialize(const ExperimentConfig& config);
/// FNV-1a of the canonical text without the output keys.
std::uint64_t config_hash(const ExperimentConfig& config);
std::string hex(std::uint64_t value);

Coefficients make_coefficients(const ExperimentConfig& config);

}  // namespace fracfem
