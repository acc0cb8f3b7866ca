#pragma once

#include <string>
#include <vector>

#include "rvm2d/bounds.hpp"
#include "rvm2d/config.hpp"
#include "rvm2d/io.hpp"
#include "rvm2d/ledger.hpp"
#include "rvm2d/support.hpp"

namespace rvm {

// Outcome of one orchestrated run.  `breaches` lists every hard-invariant
// violation by name; an empty list is the success contract (exit code 0).
struct RunArtifacts {
  std::string dir;
  std::vector<std::string> breaches;
  ConservationLedger ledger;
  SupportEnvelope envelope;
  std::vector<DecompositionRow> decomposition;

  int exit_code() const { return breaches.empty() ? 0 : 1; }
};

// Diagnostics are only meaningful when E, B and the marker distribution sit
// at the same time level; a mismatch means the leapfrog interleave was
// mis-ordered and throws std::runtime_error.
void check_time_levels(const FieldState& fields, const MarkerEnsemble& m,
                       double slack = 1e-9);

// init (sample, Poisson solve, desynchronize) -> loop (push, deposit, field
// step, diagnostics, histories, dumps) -> decomposition -> artifacts.
// Writes ledger.csv, envelope.csv, effective.cfg, snapshots, optional
// decomposition.csv and plot scripts under out_dir.
RunArtifacts run_simulation(const RunConfig& cfg, const std::string& out_dir);

// Re-runs the decomposition for one apex from a run directory's snapshots
// (histories are rebuilt from the dump cadence; denser dumps give a more
// faithful replay).
DecompositionRow decompose_from_artifacts(const std::string& run_dir,
                                          const ApexSpec& apex, double rel);

// Offline verdicts from the CSV artifacts of a finished run.
struct VerifyReport {
  EnvelopeFit fit;
  bool ratio_ok = true;
  std::vector<std::pair<std::string, double>> c_fit;  // formula id -> fit
  bool ok = true;
  std::string text;
};
VerifyReport verify_run(const std::string& run_dir);

}  // namespace rvm
