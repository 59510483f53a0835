#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "fracfem/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria, one PASS/FAIL line each"};
  fracfem::AcceptanceOptions options;
  app.add_flag("--k5", options.include_K5, "include localized K=5");
  app.add_option("--seed", options.geological_seed, "geological network seed")->capture_default_str();
  app.add_option("--only", options.only, "criterion ids")->check(CLI::Range(1, 7));
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (const auto& result : fracfem::run_acceptance(options, std::cerr)) {
    std::cout << fracfem::format_result(result) << std::endl;
    all = all && result.pass;
  }
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
