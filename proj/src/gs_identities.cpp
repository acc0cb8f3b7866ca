#include "rvm2d/gs_identities.hpp"

#include <cmath>
#include <stdexcept>

#include "rvm2d/quadrature.hpp"

namespace rvm {

double angular_xi_integral(double a) {
  if (!(a >= 0.0) || a >= 1.0)
    throw std::domain_error("angular_xi_integral: need 0 <= |phat| < 1");
  double sp = std::sqrt(1.0 + a), sm = std::sqrt(1.0 - a);
  return 4.0 * M_PI / ((sp + sm) * sp * sm);
}

double chord_integral(double a) {
  if (!(a > 0.0) || a >= 1.0) throw std::domain_error("chord_integral: need 0 < a < 1");
  return M_PI;
}

double closed_angle_integral(double k, double lo, double hi) {
  if (!(k >= 0.0) || k >= 1.0)
    throw std::domain_error("closed_angle_integral: need 0 <= k < 1");
  const double root = std::sqrt((1.0 + k) / (1.0 - k));
  const double pref = 2.0 / std::sqrt(1.0 - k * k);
  auto F = [&](double l) {
    // unwrap: atan(root*tan(l/2)) jumps by -pi across l = (2m+1) pi
    double m = std::floor(l / (2.0 * M_PI) + 0.5);
    return pref * (std::atan(root * std::tan(0.5 * (l - 2.0 * M_PI * m))) + M_PI * m);
  };
  return F(hi) - F(lo);
}

double closed_angle_prefactor(double r, double psi) {
  if (!(r > 0.0) || !(psi > 0.0))
    throw std::domain_error("closed_angle_prefactor: need r, psi > 0");
  return (r + 2.0 * psi) / (2.0 * std::sqrt(psi * (r + psi)));
}

PMomentBound p_moment_bound(double P, double P2) {
  if (!(P2 > 0.0) || !(P >= P2))
    throw std::domain_error("p_moment_bound: need P >= P2 > 0");
  QuadOptions o;
  o.rel = 1e-10;
  QuadResult q = integrate_2d(
      [](double p1, double p2) { return 1.0 / std::sqrt(1.0 + p1 * p1 + p2 * p2); },
      -P, P, -P2, P2, o);
  PMomentBound out;
  out.exact = q.value;
  out.bound = P2 * std::log1p(P);
  out.constant = out.exact / out.bound;
  return out;
}

}  // namespace rvm
