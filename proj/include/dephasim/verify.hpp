#pragma once

#include <string>
#include <vector>

namespace dephasim {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The end-to-end equivalence suite: closed forms against the brute-force
/// integrator, reduced dynamics against partial traces, both worked examples
/// against their closed forms, the operational iff-condition, the mixture and
/// random-selection representations, the entanglement scan, the infinite-bath
/// limit, and the multi-index generator embedding. tolerance_scale multiplies
/// every numeric threshold (1.0 = the contract values).
std::vector<CriterionResult> run_verification(double tolerance_scale = 1.0);

}  // namespace dephasim
