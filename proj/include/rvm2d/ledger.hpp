#pragma once

#include <cstddef>
#include <vector>

namespace rvm {

// Conserved quantities tracked along a run.  Marker weights are bare; the
// ensemble normalization (4*pi from the source terms rho = 4pi \int f dp,
// j = 4pi \int phat f dp) multiplies mass and kinetic energy so that
//   total = (1/2) sum (E1^2 + E2^2 + B^2) dA  +  norm * sum w_i p0_i
// matches the continuum invariant.
struct LedgerRow {
  double t = 0.0;
  double mass = 0.0;
  double field_energy = 0.0;
  double kinetic = 0.0;
  double total = 0.0;
  double gauss_linf = 0.0;
};

class ConservationLedger {
 public:
  // All inputs for one instant; times must be nondecreasing and the three
  // contributions must be tagged with the same t (mismatch throws).
  const LedgerRow& append(double t, double mass, double field_energy, double kinetic,
                          double gauss_linf);

  const std::vector<LedgerRow>& rows() const { return rows_; }

  // Drifts relative to the first row.
  double mass_drift() const;
  double energy_drift_rel() const;

 private:
  std::vector<LedgerRow> rows_;
};

// Deterministic kinetic/mass reductions over marker arrays (chunked partials
// combined in fixed order; result independent of thread count).
double weighted_mass(const std::vector<double>& w, double norm);
double weighted_kinetic(const std::vector<double>& p1, const std::vector<double>& p2,
                        const std::vector<double>& w, double norm);

}  // namespace rvm
