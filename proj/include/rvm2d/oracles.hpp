#pragma once

#include <string>
#include <vector>

namespace rvm {

// One identity spot check: an implemented closed form (lhs) against an
// independent evaluation (rhs), typically adaptive quadrature.
struct OracleResult {
  std::string name;
  std::string lhs_label, rhs_label;
  double lhs = 0.0, rhs = 0.0;
  double rel_diff = 0.0;  // |lhs-rhs| / max(|lhs|,|rhs|,1e-300)
};

const std::vector<std::string>& oracle_names();

// Runs one oracle by name; unknown names throw std::out_of_range listing
// the available ones.
OracleResult run_oracle(const std::string& name);

}  // namespace rvm
