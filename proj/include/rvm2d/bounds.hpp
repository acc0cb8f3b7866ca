#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rvm2d/gs_decomposition.hpp"
#include "rvm2d/support.hpp"

namespace rvm {

// An evaluatable growth formula for one piece of the force decomposition.
// Closures are pure; `uses_splits` marks the formulas that read the angular
// split scales (the others ignore that argument).  Validity windows are
// t >= t_min, P >= p_min, P2 > 0; outside them the shapes can degenerate
// (log P <= 0 and so on) and monotonicity claims are off.
struct BoundFormula {
  std::string id;
  std::string note;
  double t_min = 2.0;
  double p_min = 2.0;
  bool uses_splits = false;
  std::function<double(double t, double P, double P2, const AngularSplit&)>
      value;
};

// All force-bound shapes used by the diagnostics, keyed by id:
//   field_growth   P log P                  (single-direction benchmark)
//   kt             t P2 log P
//   ks1            t sqrt(log t) P2 log P   (field-free part; the ||K||^mu
//                                           tail lives in young_closing_check)
//   ks2_11         t P2 P^{3/2} / sqrt(A_split B_split)
//   ks2_12         t P2 log^{3/2}(P) B_split / sqrt(A_split)
//   ks2_21         t P2^{3/4} P^{5/4} C_split^{-3/4}
//   ks2_22         t P2^{1/2} log^{3/2}(P) C_split
//   ks2_h          h(B_split, C_split), the grouped three-term form
//   ks2_boundary   the four-term form of h on the boundary 4 B_split = C_split
//   ks2_twoterm    2 t (P2 P log P)^{3/4}, the optimized middle pair
//   ks2_final      t (P2 P log P)^{3/4}
const std::vector<BoundFormula>& bound_catalog();

// Lookup by id; throws std::out_of_range for unknown ids.
const BoundFormula& bound_formula(const std::string& id);

// Direct forms used by the optimizer and its tests.
double h_split(double t, double P, double P2, double B_split, double C_split);
double ks2_boundary_terms(double t, double P, double P2, double C_split,
                          double term[4]);
double interior_lower_bound(double t, double P, double P2);
double theorem_envelope(double t, double P2);  // t^8 P2^3 log^3(t P2)

// Minimizer of h on the boundary 4 B_split = C_split:
//   C_split = P2^{1/4} P^{3/4} log(P)^{-3/4}, A_split = C/2, B_split = C/4.
// Validates feasibility (window P^{w+delta} < scale < P nonempty and the
// angles below pi/4); infeasible inputs throw std::domain_error naming the
// failed constraint.  Also spot-checks minimality against a deterministic
// sample of feasible (B_split, C_split) pairs and, for P large enough that
// the comparison is forced, checks that any interior critical point would
// exceed the boundary value; failures of these self-checks throw
// std::logic_error.
AngularSplit optimize_splits(double t, double P, double P2,
                             double delta_slack = 0.05);

enum class EnvelopeVerdict { kPass, kFailStability, kFailAbsorption, kInconclusive };

const char* to_string(EnvelopeVerdict v);

// Fit of the measured long-axis extent against the anisotropy envelope
// t^8 P2^3 log^3(t P2).  Samples before T_start (first time with P >= 2,
// t >= 2, P2 > 1, and optimizer angles < pi/4) are excluded from the window.
struct EnvelopeFit {
  double c_fit = 0.0;           // max over window of ptilde / envelope
  double T_start = 0.0;
  double first_quartile_fit = 0.0;
  double last_quartile_fit = 0.0;
  bool log_absorption_ok = false;
  std::vector<double> window_t;      // retained sample times
  std::vector<double> window_ratio;  // per-sample ptilde / envelope
  std::vector<int> sample_ok;        // per-sample log-absorption flag
  EnvelopeVerdict verdict = EnvelopeVerdict::kInconclusive;
  std::string detail;
};

// PASS when the fitted constant is stable (last-quartile max ratio at most
// twice the first-quartile max) and the log-absorption consequence
// log P <= 2 (log c + 8 log(t P2)) holds on the window; fewer than 8
// retained samples is inconclusive.
EnvelopeFit envelope_verdict(const SupportEnvelope& env);

// The closing chain with mu = 1/2 and Young exponents p = 4/3, q = 4:
// absorbs the ||K||^{1/2} term, time-integrates the force bound, splits the
// P^{3/4} term with eps = 1/2, and returns the resulting envelope value
//   2 (P2^3 + t^3 P2^2 log^2 P + 4 t^8 P2^3 log^3 P).
// Asserts the absorption inequalities and exponent arithmetic on the given
// inputs (throws std::logic_error if violated).
double young_closing_check(double t, double P, double P2, double Kinf);

}  // namespace rvm
