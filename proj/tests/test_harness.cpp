#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "fracfem/render.hpp"
#include "support.hpp"

using namespace fracfem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config text round trip") {
    ExperimentConfig config = parse(
        "network.kind = geological\nnetwork.seed = 7\nnetwork.k_max = 5\n# comment\n"
        "K_range = 3..5\ntwolevel.order = ascending\nlod.nu = 0,2,ideal\nlod.omega = 1/7\n"
        "projections.pairs = 3:1\ncoefficients.A = diag:1,2\n");
    CHECK(config.network == NetworkKind::geological);
    CHECK(config.seed == 7);
    CHECK(config.K_values() == std::vector<int>{3, 4, 5});
    CHECK(config.lod_nu == std::vector<int>{0, 2, -1});
    CHECK(config.omega == doctest::Approx(1.0 / 7.0));
    const ExperimentConfig again = parse(serialize(config));
    CHECK(serialize(again) == serialize(config));
    CHECK(config_hash(again) == config_hash(config));
  }

  TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse("network.bogus = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("network.k_max = x\n"), std::invalid_argument);
    CHECK_THROWS_AS(validate(parse("network.k_max = 3\nK_range = 2..4\n")), std::invalid_argument);
    CHECK_THROWS_AS(validate(parse("twolevel.coarse_scale = 2\nK_range = 2..3\n")), std::invalid_argument);
    CHECK_NOTHROW(validate(ExperimentConfig{}));
  }

  TEST_CASE("output keys do not change the config hash") {
    ExperimentConfig a;
    ExperimentConfig b;
    b.out_dir = "elsewhere";
    b.threads = 4;
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 2;
    CHECK(config_hash(a) != config_hash(b));
  }

  TEST_CASE("presets load and validate") {
    for (const char* name : {"table1", "table2", "lod-study", "projection-study"}) {
      CAPTURE(name);
      const ExperimentConfig config = load_config(find_preset(name));
      CHECK_NOTHROW(validate(config));
    }
    CHECK_THROWS(find_preset("no-such-preset"));
  }

  TEST_CASE("csv quoting") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  }

  TEST_CASE("atomic write replaces content and leaves no temp files") {
    const auto dir = testing::scratch_dir("atomic");
    const auto path = dir / "sub" / "file.txt";
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    CHECK(slurp(path) == "second");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(path.parent_path())) ++entries;
    CHECK(entries == 1);
  }

  TEST_CASE("reference cache keys") {
    const auto dir = testing::scratch_dir("cache");
    const Vector x = testing::random_vector(33, 5);
    ReferenceCache cache(dir, 11, 22);
    CHECK_FALSE(cache.load(2).has_value());
    cache.store(2, x);
    const auto loaded = cache.load(2);
    REQUIRE(loaded.has_value());
    CHECK(*loaded == x);
    CHECK_FALSE(cache.load(3).has_value());
    CHECK_FALSE(ReferenceCache(dir, 11, 23).load(2).has_value());
    CHECK_FALSE(ReferenceCache(dir, 12, 22).load(2).has_value());

    std::filesystem::copy_file(cache.file(2), ReferenceCache(dir, 11, 99).file(2));
    CHECK_FALSE(ReferenceCache(dir, 11, 99).load(2).has_value());
    std::filesystem::resize_file(cache.file(2), 40);
    CHECK_FALSE(cache.load(2).has_value());
  }

  TEST_CASE("svg renders every edge of the level") {
    const InterfaceNetwork network = build_localized_network(3);
    for (int k = 1; k <= 3; ++k) {
      const std::string svg = render_network_svg(network, k);
      CHECK(svg.rfind("<?xml", 0) == 0);
      CHECK(svg.find("</svg>") != std::string::npos);
      std::size_t lines = 0;
      for (std::size_t pos = svg.find("<line"); pos != std::string::npos; pos = svg.find("<line", pos + 1)) ++lines;
      std::size_t expected = 0;
      for (int j = 1; j <= k; ++j) expected += network.edge_count(j);
      CHECK(lines == expected);
    }
    CHECK_THROWS_AS(render_network_svg(network, 0), std::invalid_argument);
    CHECK_THROWS_AS(render_network_svg(network, 4), std::invalid_argument);
  }

  TEST_CASE("dry run lists sizes") {
    ExperimentConfig config;
    config.k_max = 3;
    config.K_last = 3;
    const std::string plan = dry_run_plan(config);
    CHECK(plan.find("301") != std::string::npos);
    CHECK(plan.find("4374") != std::string::npos);
  }

  TEST_CASE("projection study writes a parseable archive and is deterministic") {
    ExperimentConfig config;
    config.k_max = 2;
    config.study = StudyKind::projections;
    config.projection_pairs = {{2, 1}};
    config.projection_trials = 10;
    config.out_dir = testing::scratch_dir("projection-run").string();
    std::ostringstream log;
    const RunResult first = run_experiment(config, log);
    CHECK(log.str().find("phase=geometry") != std::string::npos);
    const auto archive = nlohmann::json::parse(slurp(std::filesystem::path(config.out_dir) / "archive.json"));
    CHECK(archive["config_hash"] == hex(config_hash(config)));
    CHECK(archive["results"].size() == 1);
    CHECK(std::filesystem::exists(std::filesystem::path(config.out_dir) / "network_k2.svg"));
    CHECK(std::filesystem::exists(std::filesystem::path(config.out_dir) / "projections.csv"));

    const auto results = archive["results"].dump();
    std::ostringstream again;
    run_experiment(config, again);
    const auto rerun = nlohmann::json::parse(slurp(std::filesystem::path(config.out_dir) / "archive.json"));
    CHECK(rerun["results"].dump() == results);
  }

  TEST_CASE("two-level run reuses cached references") {
    ExperimentConfig config;
    config.k_max = 3;
    config.K_first = 2;
    config.K_last = 2;
    config.threads = 2;
    config.out_dir = testing::scratch_dir("twolevel-run").string();
    std::ostringstream log;
    run_experiment(config, log);
    const std::string table = slurp(std::filesystem::path(config.out_dir) / "twolevel.txt");
    const auto first = nlohmann::json::parse(slurp(std::filesystem::path(config.out_dir) / "archive.json"));
    CHECK(std::filesystem::exists(std::filesystem::path(config.out_dir) / "twolevel.csv"));
    CHECK(table.find("rho_K") != std::string::npos);

    std::ostringstream log2;
    run_experiment(config, log2);
    const auto second = nlohmann::json::parse(slurp(std::filesystem::path(config.out_dir) / "archive.json"));
    auto strip = [](nlohmann::json results) {
      for (auto& r : results) r.erase("reference");
      return results.dump();
    };
    CHECK(strip(second["results"]) == strip(first["results"]));
    for (const auto& entry : first["cache"]["entries"]) CHECK(entry["hit"] == false);
    for (const auto& entry : second["cache"]["entries"]) CHECK(entry["hit"] == true);
  }
}
