// Runs the acceptance battery at native scales and prints one line per
// criterion. Exit status is nonzero iff any criterion that actually ran
// failed; skipped criteria do not fail the run.
#include <cstdio>

#include "rdode/acceptance.hpp"

int main() {
  const std::vector<rdode::CriterionResult> results = rdode::run_acceptance(0);
  bool failed = false;
  for (const rdode::CriterionResult& result : results) {
    const char* status = result.skipped ? "SKIP" : (result.passed ? "PASS" : "FAIL");
    if (!result.skipped && !result.passed) failed = true;
    std::printf("[%s] %2s %-42s (%.2f s)\n", status, result.id.c_str(), result.name.c_str(),
                result.runtime_seconds);
    for (const auto& [key, value] : result.measured)
      std::printf("        %s = %.17g\n", key.c_str(), value);
    if (!result.notes.empty()) std::printf("        note: %s\n", result.notes.c_str());
  }
  return failed ? 1 : 0;
}
