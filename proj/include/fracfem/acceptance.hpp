#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fracfem {

struct AcceptanceOptions {
  bool include_K5 = false;            // localized K=5 in criterion 1 (long)
  std::uint64_t geological_seed = 1;  // seed of the table2 preset
  std::vector<int> only;              // criterion ids to run; empty runs all
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs the acceptance criteria 1..7 with their fixed tolerances. Progress
/// goes to `log`; one result per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log);

/// `PASS 3 name: detail` / `FAIL ...`
std::string format_result(const CriterionResult& result);

}  // namespace fracfem
