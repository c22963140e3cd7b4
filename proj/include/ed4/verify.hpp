#pragma once

#include <string>
#include <vector>

namespace ed4 {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;  // measured value or failure reason
};

// geometry, clockmix, shuffle, assignment, advscm, objectives
const std::vector<std::string>& verify_suite_names();

// Runs every suite whose name contains `filter` (all when empty). Unknown
// filters match nothing; the caller decides how to report that.
std::vector<CheckResult> run_verify(const std::string& filter = {});

}  // namespace ed4
