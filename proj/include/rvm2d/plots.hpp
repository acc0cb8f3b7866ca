#pragma once

#include <string>

namespace rvm {

// Writes self-contained matplotlib scripts next to a run's CSV artifacts:
//   plot_ledger.py         relative conservation drifts over time
//   plot_envelope.py       measured long-axis extent vs the fitted envelope
//   plot_decomposition.py  decomposition pieces vs their bound formulas
//                          (only when decomposition.csv exists)
// Missing required artifacts (ledger.csv, envelope.csv) raise a named error.
void emit_plots(const std::string& run_dir);

}  // namespace rvm
