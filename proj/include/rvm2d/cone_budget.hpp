#pragma once

#include <cstddef>

#include "rvm2d/history.hpp"
#include "rvm2d/vec.hpp"

namespace rvm {

// Quadrature summary for the null-cone flux (1/4) oint Kg^2 dsigma taken over
// the backward lightcone of the apex (t, x), with surface measure
// dsigma = sqrt(2) * r * dr * dtheta on the mantle r = t - s.
struct ConeBudget {
  double value = 0.0;     // (1/4) oint Kg^2 dsigma
  double max_kg = 0.0;    // largest |Kg| among the evaluated nodes
  std::size_t nodes = 0;  // field evaluations used
};

// Composite midpoint rule over cone rings.  `rings` sets the radial (= time)
// resolution; each ring gets an angular node count proportional to its
// circumference in mesh widths, so thin rings near the apex stay cheap.
// Throws std::invalid_argument when the recorded history does not cover
// [0, t] or t is not a finite nonnegative time.  A zero-height cone (t = 0)
// degenerates to a point and yields zero.
ConeBudget cone_Kg_budget(const FieldHistory& hist, double t, const Vec2& x,
                          int rings = 96);

// True when a measured budget exceeds `factor` times the calibrated cone
// constant (the total energy of the run at its initial time).
bool cone_budget_flagged(const ConeBudget& budget, double calibration,
                        double factor = 10.0);

}  // namespace rvm
