#pragma once

#include <vector>

#include "rvm2d/fields.hpp"
#include "rvm2d/markers.hpp"

namespace rvm {

// Node-centred charge density from linear (CIC) shapes:
//   rho(i,j) = norm * sum_k w_k S(x_i - X_k) S(y_j - Y_k) / (dx dy)
// Per-chunk scratch grids merged in chunk order, so the result is bitwise
// independent of thread count.
void deposit_charge(const MarkerEnsemble& m, double half_width, Grid2D& rho);

// Charge-conserving current from the density decomposition of the marker
// motion x_before -> x_after (one step, displacement under one cell).  The
// discrete continuity equation
//   (rho^{n+1} - rho^n)/dt + div j = 0
// holds to round-off against deposit_charge at the two position sets.
// j1 lives on E1 edges, j2 on E2 edges.
void deposit_current(const MarkerEnsemble& m, const std::vector<double>& x1_before,
                     const std::vector<double>& x2_before, double half_width, double dt,
                     Grid2D& j1, Grid2D& j2);

// max residual of the discrete continuity equation, for tests
double continuity_residual(const Grid2D& rho_old, const Grid2D& rho_new, const Grid2D& j1,
                           const Grid2D& j2, double dx, double dy, double dt);

}  // namespace rvm
