#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracfem/config.hpp"
#include "fracfem/lod.hpp"
#include "fracfem/projections.hpp"
#include "fracfem/twolevel.hpp"

namespace fracfem {

inline constexpr const char* kToolVersion = "0.3.0";

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

InterfaceNetwork make_network(const ExperimentConfig& config);
NetworkConstants make_constants(const ExperimentConfig& config, const InterfaceNetwork& network);

/// Reference solutions on disk, keyed by network hash, problem hash and K.
/// A file is used only if its stored keys and size match exactly.
class ReferenceCache {
 public:
  ReferenceCache(std::filesystem::path dir, std::uint64_t network_hash, std::uint64_t problem_hash);
  std::optional<Vector> load(int K) const;
  void store(int K, const Vector& x) const;
  std::filesystem::path file(int K) const;

 private:
  std::filesystem::path dir_;
  std::uint64_t network_hash_;
  std::uint64_t problem_hash_;
};

/// Hash of everything the discrete problem depends on besides the network.
std::uint64_t problem_hash(const ExperimentConfig& config);

/// Wall-clock phases, printed as `phase=<name> seconds=<t>`.
class PhaseLog {
 public:
  explicit PhaseLog(std::ostream& out) : out_(out) {}
  void begin(std::string name);
  void end();
  struct Entry {
    std::string name;
    double seconds;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::ostream& out_;
  std::string current_;
  std::chrono::steady_clock::time_point start_;
  std::vector<Entry> entries_;
};

/// RFC-4180 field quoting.
std::string csv_escape(const std::string& field);

/// Header comment lines carried by every text table.
std::string table_preamble(const ExperimentConfig& config);

/// Rows ν = 1..sweeps, one column per K, footer ρ_K and stopping index.
std::string format_twolevel_table(const std::vector<IterationReport>& reports, const ExperimentConfig& config);
std::string twolevel_csv(const std::vector<IterationReport>& reports, const ExperimentConfig& config);
std::string format_lod_table(const std::vector<LodErrorRow>& rows, const ExperimentConfig& config);
std::string lod_csv(const std::vector<LodErrorRow>& rows, const ExperimentConfig& config);

struct ProjectionCheck {
  int K = 0;
  int k = 0;
  int trials = 0;
  double idempotency = 0.0;      // max |Π_H Π_H v - Π_H v|
  double mean_defect = 0.0;      // max per-cell |∫ v - ∫ Π_H v|
  double seminorm_ratio = 0.0;   // max per-cell |Π_H v|_1 / |v|_1
  bool local = false;            // Π_k rows stay within their cell
  ProjectionBounds bounds;
};

ProjectionCheck check_projections(Discretization& disc, int K, int k, int trials, std::uint64_t seed);
std::string format_projection_table(const std::vector<ProjectionCheck>& rows, const ExperimentConfig& config);
std::string projection_csv(const std::vector<ProjectionCheck>& rows, const ExperimentConfig& config);

struct RunResult {
  std::vector<std::filesystem::path> outputs;
  std::string archive_json;
};

/// Planned problem sizes without solving.
std::string dry_run_plan(const ExperimentConfig& config);

/// Runs the configured study and writes tables, CSV, SVG renders and
/// archive.json into config.out_dir.
RunResult run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace fracfem
