#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fracfem/acceptance.hpp"
#include "fracfem/harness.hpp"
#include "fracfem/render.hpp"

namespace {

struct Common {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> k_max;
  std::string out;
  std::optional<int> threads;
};

void add_common(CLI::App& cmd, Common& common) {
  cmd.add_option("--config", common.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  cmd.add_option("--preset", common.preset, "bundled preset: table1, table2, lod-study, projection-study");
  cmd.add_option("--seed", common.seed, "network / sampling seed");
  cmd.add_option("--k-max", common.k_max, "network depth");
  cmd.add_option("--out", common.out, "output directory");
  cmd.add_option("--threads", common.threads, "worker threads for reference solves")->check(CLI::PositiveNumber);
}

fracfem::ExperimentConfig resolve(const Common& common) {
  fracfem::ExperimentConfig config;
  if (!common.config_path.empty()) {
    config = fracfem::load_config(common.config_path);
  } else if (!common.preset.empty()) {
    config = fracfem::load_config(fracfem::find_preset(common.preset));
  }
  if (common.seed) config.seed = *common.seed;
  if (common.k_max) config.k_max = *common.k_max;
  if (!common.out.empty()) config.out_dir = common.out;
  if (common.threads) config.threads = *common.threads;
  fracfem::validate(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractal interface problems: two-level solver, projections and LOD studies"};
  app.require_subcommand(1);

  Common run_opts;
  bool dry_run = false;
  auto* run = app.add_subcommand("run", "run the configured study and write tables, CSV, SVG and archive.json");
  add_common(*run, run_opts);
  run->add_flag("--dry-run", dry_run, "validate and print planned dof counts without solving");

  bool with_k5 = false;
  std::uint64_t check_seed = 1;
  std::vector<int> only;
  auto* check = app.add_subcommand("check", "acceptance suite; exit status 0 only if every criterion passes");
  check->add_flag("--k5", with_k5, "include the localized K=5 run in criterion 1");
  check->add_option("--seed", check_seed, "geological network seed")->capture_default_str();
  check->add_option("--only", only, "criterion ids to run")->check(CLI::Range(1, 7));

  Common render_opts;
  int level = 0;
  auto* render = app.add_subcommand("render", "write network_k<k>.svg for one level or all levels");
  add_common(*render, render_opts);
  render->add_option("--level", level, "level k (0: every level)");

  Common inspect_opts;
  std::string network_out;
  auto* inspect = app.add_subcommand("inspect", "print the resolved configuration, hashes and network constants");
  add_common(*inspect, inspect_opts);
  inspect->add_option("--write-network", network_out, "also write the network in text form");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const fracfem::ExperimentConfig config = resolve(run_opts);
      if (dry_run) {
        std::cout << fracfem::dry_run_plan(config);
        return EXIT_SUCCESS;
      }
      const fracfem::RunResult result = fracfem::run_experiment(config, std::cout);
      for (const auto& path : result.outputs) std::cout << "wrote " << path.string() << '\n';
      return EXIT_SUCCESS;
    }
    if (check->parsed()) {
      fracfem::AcceptanceOptions options;
      options.include_K5 = with_k5;
      options.geological_seed = check_seed;
      options.only = only;
      bool all = true;
      for (const auto& result : fracfem::run_acceptance(options, std::cerr)) {
        std::cout << fracfem::format_result(result) << '\n';
        all = all && result.pass;
      }
      return all ? EXIT_SUCCESS : EXIT_FAILURE;
    }
    if (render->parsed()) {
      const fracfem::ExperimentConfig config = resolve(render_opts);
      const fracfem::InterfaceNetwork network = fracfem::make_network(config);
      const int first = level > 0 ? level : 1;
      const int last = level > 0 ? level : network.depth();
      for (int k = first; k <= last; ++k) {
        const auto path = std::filesystem::path(config.out_dir) / ("network_k" + std::to_string(k) + ".svg");
        fracfem::write_file_atomic(path, fracfem::render_network_svg(network, k));
        std::cout << "wrote " << path.string() << '\n';
      }
      return EXIT_SUCCESS;
    }
    if (inspect->parsed()) {
      const fracfem::ExperimentConfig config = resolve(inspect_opts);
      const fracfem::InterfaceNetwork network = fracfem::make_network(config);
      const fracfem::NetworkConstants constants = fracfem::make_constants(config, network);
      std::cout << fracfem::serialize(config);
      std::cout << "config_hash = " << fracfem::hex(fracfem::config_hash(config)) << '\n';
      std::cout << "network_hash = " << fracfem::hex(fracfem::network_hash(network)) << '\n';
      std::cout << "problem_hash = " << fracfem::hex(fracfem::problem_hash(config)) << '\n';
      std::cout << "level  edges  length      C_j        weight     d_j\n";
      for (int j = 1; j <= network.depth(); ++j) {
        std::printf("%5d %6zu %8.4f %10.4g %10.4g %10.4g\n", j, network.edge_count(j), network.length(j),
                    constants.C[j], constants.jump_weight(j), constants.d[j]);
      }
      std::cout << "self_similarity " << (constants.self_similarity_condition() ? "holds" : "violated")
                << ", neighbor bound " << constants.neighbor_bound << '\n';
      if (!network_out.empty()) {
        std::ofstream out(network_out);
        fracfem::write_network(out, network);
        std::cout << "wrote " << network_out << '\n';
      }
      return EXIT_SUCCESS;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return EXIT_SUCCESS;
}
