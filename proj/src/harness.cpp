#include "fracfem/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "fracfem/render.hpp"

namespace fracfem {

namespace {

constexpr char kCacheMagic[8] = {'F', 'R', 'F', 'R', 'E', 'F', '0', '1'};

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fixed(double value, int digits) {
  if (!std::isfinite(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string sci(double value, int digits = 3) {
  if (!std::isfinite(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, value);
  return buf;
}

std::string exact(double value) {
  if (!std::isfinite(value)) return "nan";
  char buf[64];
  const auto end = std::to_chars(buf, buf + sizeof buf, value).ptr;
  return {buf, end};
}

std::string pad(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : std::string(width - text.size(), ' ') + text;
}

class CsvWriter {
 public:
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << csv_escape(fields[i]);
    out_ << "\r\n";
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::vector<std::string> meta_header() { return {"config_hash", "seed", "network", "f", "omega", "reference_tol"}; }

std::vector<std::string> meta_fields(const ExperimentConfig& c) {
  return {hex(config_hash(c)), std::to_string(c.seed), to_string(c.network), c.f_mode, exact(c.omega),
          exact(c.reference_tol)};
}

template <class T>
std::vector<T> concat(std::vector<T> a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

nlohmann::json report_json(const IterationReport& r) {
  nlohmann::json j;
  j["K"] = r.K;
  j["fine_dofs"] = r.fine_dofs;
  j["coarse_dofs"] = r.coarse_dofs;
  j["blocks"] = r.num_blocks;
  j["errors"] = r.errors;
  j["factors"] = r.factors;
  j["geometric_mean"] = r.geometric_mean;
  j["discretization_error"] = r.discretization_error ? nlohmann::json(*r.discretization_error) : nlohmann::json();
  j["stopping_index"] = r.stopping_index ? nlohmann::json(*r.stopping_index) : nlohmann::json();
  j["reference"] = {{"iterations", r.reference.iterations},
                    {"relative_residual", r.reference.relative_residual},
                    {"converged", r.reference.converged}};
  return j;
}

}  // namespace

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char ch : field) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path temp = path;
  temp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 1000000);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

InterfaceNetwork make_network(const ExperimentConfig& c) {
  switch (c.network) {
    case NetworkKind::localized:
      return build_localized_network(c.k_max);
    case NetworkKind::geological:
      return build_geological_network(c.k_max, c.seed);
    case NetworkKind::custom:
      break;
  }
  throw std::invalid_argument("custom networks cannot be built from a config");
}

NetworkConstants make_constants(const ExperimentConfig& c, const InterfaceNetwork& network) {
  return constants_for(network, c.c_frak, c.localized_constants, {c.chord_lines, c.seed});
}

std::uint64_t problem_hash(const ExperimentConfig& c) {
  std::ostringstream key;
  key << "c=" << exact(c.c_frak) << ";constants=" << static_cast<int>(c.localized_constants)
      << ";chords=" << c.chord_lines << ";seed=" << c.seed << ";A=" << c.a_mode << ";B=" << c.b_mode
      << ";f=" << c.f_mode << ";tol=" << exact(c.reference_tol);
  return fnv1a(key.str());
}

ReferenceCache::ReferenceCache(std::filesystem::path dir, std::uint64_t network_hash, std::uint64_t problem_hash)
    : dir_(std::move(dir)), network_hash_(network_hash), problem_hash_(problem_hash) {}

std::filesystem::path ReferenceCache::file(int K) const {
  return dir_ / ("ref-" + hex(network_hash_) + "-" + hex(problem_hash_) + "-K" + std::to_string(K) + ".bin");
}

std::optional<Vector> ReferenceCache::load(int K) const {
  std::ifstream in(file(K), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint64_t net = 0, prob = 0;
  std::int64_t level = 0, n = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&net), sizeof net);
  in.read(reinterpret_cast<char*>(&prob), sizeof prob);
  in.read(reinterpret_cast<char*>(&level), sizeof level);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || !std::equal(magic, magic + 8, kCacheMagic) || net != network_hash_ || prob != problem_hash_ ||
      level != K || n < 0)
    return std::nullopt;
  Vector x(n);
  in.read(reinterpret_cast<char*>(x.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) return std::nullopt;
  return x;
}

void ReferenceCache::store(int K, const Vector& x) const {
  std::string blob(kCacheMagic, 8);
  auto put = [&blob](const auto& value) {
    blob.append(reinterpret_cast<const char*>(&value), sizeof value);
  };
  put(network_hash_);
  put(problem_hash_);
  put(static_cast<std::int64_t>(K));
  put(static_cast<std::int64_t>(x.size()));
  blob.append(reinterpret_cast<const char*>(x.data()), x.size() * sizeof(double));
  write_file_atomic(file(K), blob);
}

void PhaseLog::begin(std::string name) {
  if (!current_.empty()) end();
  current_ = std::move(name);
  start_ = std::chrono::steady_clock::now();
}

void PhaseLog::end() {
  if (current_.empty()) return;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  entries_.push_back({current_, seconds});
  out_ << "phase=" << current_ << " seconds=" << fixed(seconds, 3) << '\n';
  current_.clear();
}

std::string table_preamble(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "# config " << hex(config_hash(c)) << "  network " << to_string(c.network) << "  seed " << c.seed
      << "  c " << exact(c.c_frak) << "\n";
  out << "# A " << c.a_mode << "  B " << c.b_mode << "  f " << c.f_mode << "  omega " << exact(c.omega)
      << "  reference_tol " << exact(c.reference_tol) << "\n";
  return out.str();
}

std::string format_twolevel_table(const std::vector<IterationReport>& reports, const ExperimentConfig& c) {
  std::ostringstream out;
  out << table_preamble(c);
  out << "# coarse scale " << c.coarse_scale << "  order " << to_string(c.order)
      << (c.symmetric ? "  symmetric" : "") << "\n";
  const std::size_t w = 10;
  out << pad("nu", 6);
  for (const auto& r : reports) out << pad("K=" + std::to_string(r.K), w);
  out << '\n';
  int rows = 0;
  for (const auto& r : reports) rows = std::max(rows, static_cast<int>(r.factors.size()));
  for (int nu = 1; nu <= rows; ++nu) {
    out << pad(std::to_string(nu), 6);
    for (const auto& r : reports)
      out << pad(nu <= static_cast<int>(r.factors.size()) ? fixed(r.factors[nu - 1], 3) : "", w);
    out << '\n';
  }
  out << pad("rho_K", 6);
  for (const auto& r : reports) out << pad(fixed(r.geometric_mean, 3), w);
  out << '\n' << pad("stop", 6);
  for (const auto& r : reports) out << pad(r.stopping_index ? std::to_string(*r.stopping_index) : "-", w);
  out << '\n' << pad("dofs", 6);
  for (const auto& r : reports) out << pad(std::to_string(r.fine_dofs), w);
  out << '\n';
  return out.str();
}

std::string twolevel_csv(const std::vector<IterationReport>& reports, const ExperimentConfig& c) {
  CsvWriter csv;
  csv.row(concat(meta_header(), {"K", "fine_dofs", "coarse_dofs", "blocks", "nu", "error", "factor",
                                 "geometric_mean", "discretization_error", "stopping_index"}));
  for (const auto& r : reports) {
    const std::string disc = r.discretization_error ? exact(*r.discretization_error) : "";
    const std::string stop = r.stopping_index ? std::to_string(*r.stopping_index) : "";
    for (std::size_t nu = 0; nu < r.errors.size(); ++nu)
      csv.row(concat(meta_fields(c), {std::to_string(r.K), std::to_string(r.fine_dofs), std::to_string(r.coarse_dofs),
                                      std::to_string(r.num_blocks), std::to_string(nu), exact(r.errors[nu]),
                                      nu == 0 ? "" : exact(r.factors[nu - 1]), exact(r.geometric_mean), disc, stop}));
  }
  return csv.str();
}

std::string format_lod_table(const std::vector<LodErrorRow>& rows, const ExperimentConfig& c) {
  std::ostringstream out;
  out << table_preamble(c);
  out << "# K " << c.lod_K << "\n";
  out << pad("k", 3) << pad("nu", 7) << pad("dofs_k", 8) << pad("dofs_K", 8) << pad("h_error", 12)
      << pad("l2_error", 12) << '\n';
  for (const auto& r : rows)
    out << pad(std::to_string(r.k), 3) << pad(r.nu < 0 ? "ideal" : std::to_string(r.nu), 7)
        << pad(std::to_string(r.coarse_dofs), 8) << pad(std::to_string(r.fine_dofs), 8) << pad(sci(r.h_error), 12)
        << pad(sci(r.l2_error), 12) << '\n';
  return out.str();
}

std::string lod_csv(const std::vector<LodErrorRow>& rows, const ExperimentConfig& c) {
  CsvWriter csv;
  csv.row(concat(meta_header(), {"K", "k", "nu", "coarse_dofs", "fine_dofs", "h_error", "l2_error"}));
  for (const auto& r : rows)
    csv.row(concat(meta_fields(c), {std::to_string(c.lod_K), std::to_string(r.k), r.nu < 0 ? "ideal" : std::to_string(r.nu),
                                    std::to_string(r.coarse_dofs), std::to_string(r.fine_dofs), exact(r.h_error),
                                    exact(r.l2_error)}));
  return csv.str();
}

ProjectionCheck check_projections(Discretization& disc, int K, int k, int trials, std::uint64_t seed) {
  const ProjectionStack stack(disc, K, k);
  ProjectionCheck check;
  check.K = K;
  check.k = k;
  check.trials = trials;
  std::mt19937_64 rng(mix_seed(seed, 0x6964656d));
  std::normal_distribution<double> normal;
  const int n = stack.fine().size();
  const int cells = stack.coarse().num_cells();
  for (int t = 0; t < trials; ++t) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    const Vector ext = stack.embedding() * v;
    const Vector once = stack.apply_pi_Hk(ext);
    const Vector twice = stack.apply_pi_Hk(once);
    check.idempotency = std::max(check.idempotency, (twice - once).cwiseAbs().maxCoeff());
    for (int G = 0; G < cells; ++G) {
      check.mean_defect =
          std::max(check.mean_defect, std::abs(stack.cell_integral(G, ext) - stack.cell_integral(G, once)));
      const double before = stack.cell_seminorm(G, ext);
      if (before > 0.0) check.seminorm_ratio = std::max(check.seminorm_ratio, stack.cell_seminorm(G, once) / before);
    }
  }
  check.local = true;
  const SparseMatrix& pi = stack.pi_k();
  for (int col = 0; col < pi.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(pi, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      const int column = static_cast<int>(it.col());
      if (stack.coarse().cell_of(row) != stack.coarse_cell_of(stack.fine().cell_of(column))) check.local = false;
    }
  check.bounds = verify_projection_bounds(stack, disc, trials, seed);
  return check;
}

std::string format_projection_table(const std::vector<ProjectionCheck>& rows, const ExperimentConfig& c) {
  std::ostringstream out;
  out << table_preamble(c);
  out << pad("K", 3) << pad("k", 3) << pad("trials", 8) << pad("idempotency", 13) << pad("mean_defect", 13)
      << pad("seminorm", 12) << pad("local", 7) << pad("stability", 11) << pad("approx", 9) << '\n';
  for (const auto& r : rows)
    out << pad(std::to_string(r.K), 3) << pad(std::to_string(r.k), 3) << pad(std::to_string(r.trials), 8)
        << pad(sci(r.idempotency, 2), 13) << pad(sci(r.mean_defect, 2), 13) << pad(fixed(r.seminorm_ratio, 9), 12)
        << pad(r.local ? "yes" : "no", 7) << pad(fixed(r.bounds.max_stability, 4), 11)
        << pad(fixed(r.bounds.max_approximation, 4), 9) << '\n';
  return out.str();
}

std::string projection_csv(const std::vector<ProjectionCheck>& rows, const ExperimentConfig& c) {
  CsvWriter csv;
  csv.row(concat(meta_header(), {"K", "k", "trials", "idempotency", "mean_defect", "seminorm_ratio", "local",
                                 "max_stability", "max_approximation"}));
  for (const auto& r : rows)
    csv.row(concat(meta_fields(c), {std::to_string(r.K), std::to_string(r.k), std::to_string(r.trials),
                                    exact(r.idempotency), exact(r.mean_defect), exact(r.seminorm_ratio),
                                    r.local ? "true" : "false", exact(r.bounds.max_stability),
                                    exact(r.bounds.max_approximation)}));
  return csv.str();
}

namespace {

std::vector<int> scales_used(const ExperimentConfig& c) {
  std::set<int> scales;
  switch (c.study) {
    case StudyKind::twolevel:
      scales.insert(c.coarse_scale);
      for (int K : c.K_values()) scales.insert(K);
      break;
    case StudyKind::lod:
      scales.insert(c.lod_K);
      for (int k : c.lod_k) scales.insert(k);
      break;
    case StudyKind::projections:
      for (auto [K, k] : c.projection_pairs) {
        scales.insert(K);
        scales.insert(k);
      }
      break;
  }
  return {scales.begin(), scales.end()};
}

}  // namespace

std::string dry_run_plan(const ExperimentConfig& c) {
  validate(c);
  const InterfaceNetwork network = make_network(c);
  MeshHierarchy meshes(network.scale_to_mesh);
  std::ostringstream out;
  out << table_preamble(c);
  out << "study " << to_string(c.study) << "  network hash " << hex(network_hash(network)) << '\n';
  out << pad("scale", 6) << pad("mesh", 6) << pad("triangles", 11) << pad("cells", 8) << pad("dofs", 10) << '\n';
  for (int k : scales_used(c)) {
    auto mesh = meshes.shared_at_scale(k);
    auto partition = std::make_shared<const CellPartition>(extract_cells(network, k, *mesh));
    const BrokenSpace space(mesh, partition);
    out << pad(std::to_string(k), 6) << pad(std::to_string(network.mesh_level(k)), 6)
        << pad(std::to_string(mesh->num_triangles()), 11) << pad(std::to_string(partition->num_cells()), 8)
        << pad(std::to_string(space.size()), 10) << '\n';
  }
  return out.str();
}

RunResult run_experiment(const ExperimentConfig& c, std::ostream& log) {
  validate(c);
  PhaseLog phases(log);
  const std::filesystem::path out_dir(c.out_dir);
  RunResult result;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file_atomic(out_dir / name, content);
    result.outputs.push_back(out_dir / name);
  };

  phases.begin("geometry");
  InterfaceNetwork network = make_network(c);
  NetworkConstants constants = make_constants(c, network);
  std::ostringstream network_text;
  write_network(network_text, network);
  const std::uint64_t net_hash = network_hash(network);
  phases.end();

  nlohmann::json archive;
  archive["tool_version"] = kToolVersion;
  archive["config_hash"] = hex(config_hash(c));
  archive["config"] = serialize(c);
  archive["network_hash"] = hex(net_hash);
  archive["problem_hash"] = hex(problem_hash(c));
  archive["network"] = network_text.str();
  archive["study"] = to_string(c.study);
  archive["f"] = c.f_mode;
  archive["omega"] = c.omega;
  archive["reference_tol"] = c.reference_tol;
  archive["constants"] = {{"C", constants.C}, {"d", constants.d}};

  for (int k = 1; k <= network.depth(); ++k) emit("network_k" + std::to_string(k) + ".svg", render_network_svg(network, k));

  Discretization disc(std::move(network), std::move(constants), make_coefficients(c));
  const std::vector<int> scales = scales_used(c);
  phases.begin("mesh");
  for (int k : scales) disc.meshes().at_scale(k);
  phases.begin("assembly");
  for (int k : scales) disc.at(k);
  phases.end();

  switch (c.study) {
    case StudyKind::twolevel: {
      const ReferenceCache cache(c.cache_path(), net_hash, problem_hash(c));
      std::map<int, Vector> references;
      std::map<int, SolveReport> solve_reports;
      nlohmann::json cache_log = nlohmann::json::array();
      phases.begin("reference");
      std::vector<int> missing;
      for (int k : scales) {
        if (auto hit = cache.load(k); hit && hit->size() == disc.at(k).space->size()) {
          references[k] = std::move(*hit);
          solve_reports[k] = {0, 0.0, true};
          cache_log.push_back({{"K", k}, {"hit", true}});
        } else {
          missing.push_back(k);
        }
      }
      std::vector<CgResult> solved(missing.size());
      std::vector<const ScaleData*> data;
      for (int k : missing) data.push_back(&disc.at(k));
      const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(c.threads), missing.size());
      auto solve_range = [&](std::size_t first) {
        for (std::size_t i = first; i < missing.size(); i += std::max<std::size_t>(workers, 1))
          solved[i] = cg_solve(data[i]->op, data[i]->load, c.reference_tol);
      };
      if (workers > 1) {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(solve_range, w);
      } else {
        solve_range(0);
      }
      for (std::size_t i = 0; i < missing.size(); ++i) {
        const int k = missing[i];
        if (!solved[i].report.converged)
          throw std::runtime_error("reference solve did not converge at K=" + std::to_string(k) + " after " +
                                   std::to_string(solved[i].report.iterations) + " iterations");
        cache.store(k, solved[i].x);
        solve_reports[k] = solved[i].report;
        references[k] = std::move(solved[i].x);
        cache_log.push_back({{"K", k}, {"hit", false}, {"iterations", solve_reports[k].iterations}});
      }

      phases.begin("sweeps");
      TwoLevelConfig solver;
      solver.coarse_scale = c.coarse_scale;
      solver.sweeps = c.sweeps;
      solver.order = c.order;
      solver.symmetric = c.symmetric;
      solver.reference_tol = c.reference_tol;
      ExperimentHooks hooks;
      hooks.load = [&references](int K) -> std::optional<Vector> {
        auto it = references.find(K);
        if (it == references.end()) return std::nullopt;
        return it->second;
      };
      std::vector<IterationReport> reports = run_convergence_experiment(disc, c.K_values(), solver, hooks);
      for (auto& r : reports) r.reference = solve_reports[r.K];
      phases.end();

      emit("twolevel.txt", format_twolevel_table(reports, c));
      emit("twolevel.csv", twolevel_csv(reports, c));
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : reports) rows.push_back(report_json(r));
      archive["results"] = rows;
      archive["cache"] = {{"dir", c.cache_path().string()}, {"entries", cache_log}};
      log << format_twolevel_table(reports, c);
      break;
    }
    case StudyKind::lod: {
      phases.begin("lod");
      const std::vector<LodErrorRow> rows = lod_error_study(disc, c.lod_K, c.lod_k, c.lod_nu, c.omega, c.reference_tol);
      phases.end();
      emit("lod.txt", format_lod_table(rows, c));
      emit("lod.csv", lod_csv(rows, c));
      nlohmann::json items = nlohmann::json::array();
      for (const auto& r : rows)
        items.push_back({{"k", r.k}, {"nu", r.nu}, {"coarse_dofs", r.coarse_dofs}, {"fine_dofs", r.fine_dofs},
                         {"h_error", r.h_error}, {"l2_error", r.l2_error}});
      archive["results"] = items;
      log << format_lod_table(rows, c);
      break;
    }
    case StudyKind::projections: {
      phases.begin("projections");
      std::vector<ProjectionCheck> rows;
      for (auto [K, k] : c.projection_pairs) rows.push_back(check_projections(disc, K, k, c.projection_trials, c.seed));
      phases.end();
      emit("projections.txt", format_projection_table(rows, c));
      emit("projections.csv", projection_csv(rows, c));
      nlohmann::json items = nlohmann::json::array();
      for (const auto& r : rows)
        items.push_back({{"K", r.K}, {"k", r.k}, {"trials", r.trials}, {"idempotency", r.idempotency},
                         {"mean_defect", r.mean_defect}, {"seminorm_ratio", r.seminorm_ratio}, {"local", r.local},
                         {"max_stability", r.bounds.max_stability},
                         {"max_approximation", r.bounds.max_approximation}});
      archive["results"] = items;
      log << format_projection_table(rows, c);
      break;
    }
  }

  nlohmann::json timings = nlohmann::json::array();
  for (const auto& e : phases.entries()) timings.push_back({{"phase", e.name}, {"seconds", e.seconds}});
  archive["timings"] = timings;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& p : result.outputs) files.push_back(p.filename().string());
  archive["outputs"] = files;
  result.archive_json = archive.dump(2) + "\n";
  emit("archive.json", result.archive_json);
  return result;
}

}  // namespace fracfem
