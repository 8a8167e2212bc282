#pragma once

#include <string>
#include <vector>

#include "ocw/atomic_model.hpp"

namespace ocw {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Embedded invariant checks. The effective-branching table is a parameter so
/// a corrupted copy can be checked as a negative control.
std::vector<CheckResult> run_validation_suite(const BranchingTable& table1);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace ocw
