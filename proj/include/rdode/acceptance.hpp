#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rdode {

struct CriterionResult {
  std::string id;
  std::string name;
  bool passed = false;
  bool skipped = false;
  double runtime_seconds = 0.0;
  std::vector<std::pair<std::string, double>> measured;
  std::string notes;
};

// Runs the end-to-end checks the toolkit is accepted against. grid_n = 0 keeps
// each check's native resolution; a positive value overrides it where the
// check remains meaningful and skips the ones that need finer grids.
std::vector<CriterionResult> run_acceptance(int grid_n = 0);

}  // namespace rdode
