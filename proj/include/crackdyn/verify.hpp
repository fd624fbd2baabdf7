#pragma once

#include "crackdyn/diagnostics.hpp"

#include <string>
#include <vector>

namespace crackdyn {

struct Check {
  std::string name;
  bool pass = true;
  bool skipped = false;  // not applicable to this configuration; counts as a pass
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;
  bool all_pass() const;
};

/// Runs the scenario once and checks, on the computed trajectory and at the
/// scenario's epsilon: derivatives and monotonicity of the regularizations,
/// consistency, symmetry and semidefiniteness of the interface tangent,
/// the discrete energy balance, energy decay (gamma = 0 and zero loads
/// only), sampled VI residuals, and the one-sided interface conditions.
VerifyReport verify(const Scenario& scenario, unsigned seed = 1);

}  // namespace crackdyn
