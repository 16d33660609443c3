#pragma once

// Executable invariant suites for every module, run by `confspec verify`.
// Each check reports a measured value against a threshold.

#include <cstdint>
#include <string>
#include <vector>

namespace confspec::verify {

enum class Size { Small, Full };

struct VerifyOptions {
  Size size = Size::Small;
  std::uint64_t seed = 20240601;
  double eigen_tolerance = 1e-8;     // relative Frobenius reconstruction residual
  double identity_tolerance = 1e-8;  // finite-d measure identities
};

struct CheckResult {
  std::string suite;
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool below = true;  // pass iff measured <= threshold (or >= when false)
  bool passed = false;
};

std::vector<CheckResult> run_verification(const VerifyOptions& opts);

std::string format_report(const std::vector<CheckResult>& results);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace confspec::verify
