#pragma once

#include <string>
#include <vector>

namespace istftnet {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Embedded invariant suites: convolution kernels vs. the direct-loop
/// reference, iSTFT round trip, PQMF round trip and the architecture budget.
/// `inject_fault` perturbs the optimized side of the conv comparison so the
/// harness itself can be checked for a failing exit.
std::vector<SuiteResult> run_selftest(bool inject_fault = false);

}  // namespace istftnet
