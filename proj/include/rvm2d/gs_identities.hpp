#pragma once

namespace rvm {

// Closed form of the disk integral
//   I(a) = \int_{|xi|<=1} dxi / ((1 + phat.xi)^{3/2} sqrt(1-|xi|^2)),  a = |phat|,
// namely (2pi/a) (1/sqrt(1-a) - 1/sqrt(1+a)), evaluated in the rationalized
// form 4pi / ((sqrt(1+a)+sqrt(1-a)) sqrt(1-a^2)) which is smooth at a = 0
// (limit 2pi) and always <= 4pi p0.  Domain: 0 <= a < 1 (throws otherwise).
double angular_xi_integral(double phat_mag);

// \int_{-a}^{a} dx / sqrt(a^2 - x^2) = pi for every a in (0,1).
// Validates the domain and returns pi; the quadrature cross-check lives in
// the test oracles.
double chord_integral(double a);

// \int_{lo}^{hi} dlambda / (1 - k cos(lambda)) for 0 <= k < 1 via the
// monotone antiderivative
//   F(l) = (2/sqrt(1-k^2)) * (atan(sqrt((1+k)/(1-k)) tan(l/2)) + pi*floor(l/(2pi)+1/2))
// (branch-corrected across odd multiples of pi).
double closed_angle_integral(double k, double lo, double hi);

// prefactor 1/sqrt(1-k^2) at k = r/(r+2psi), equal to (r+2psi)/(2 sqrt(psi(r+psi)))
double closed_angle_prefactor(double r, double psi);

struct PMomentBound {
  double exact = 0.0;    // \int_{[-P,P]x[-P2,P2]} dp / p0  (adaptive quadrature)
  double bound = 0.0;    // P2 * log(1 + P)
  double constant = 0.0; // exact / bound
};

// The 1/p0 moment over the support rectangle against its P2 log(1+P) bound.
// Requires P >= P2 > 0; exact <= 8 * bound always holds on that domain.
PMomentBound p_moment_bound(double P, double P2);

}  // namespace rvm
