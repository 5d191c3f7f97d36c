#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cotred::app {

struct SelftestOptions {
  /// Mutation check: flips the sign of the Euler equations in the reduced
  /// rigid-body flow; the suite must then fail.
  bool flip_euler_sign = false;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<SuiteResult> run_selftest(const SelftestOptions& options = {});

/// Prints one line per suite; returns 0 if all passed, 1 otherwise.
int report_selftest(const std::vector<SuiteResult>& results, std::ostream& os);

}  // namespace cotred::app
