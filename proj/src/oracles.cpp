#include "rvm2d/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "rvm2d/bounds.hpp"
#include "rvm2d/gs_decomposition.hpp"
#include "rvm2d/gs_identities.hpp"
#include "rvm2d/quadrature.hpp"

namespace rvm {

namespace {

OracleResult make(const std::string& name, const std::string& ll, double lhs,
                  const std::string& rl, double rhs) {
  OracleResult r;
  r.name = name;
  r.lhs_label = ll;
  r.rhs_label = rl;
  r.lhs = lhs;
  r.rhs = rhs;
  r.rel_diff = std::abs(lhs - rhs) /
               std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return r;
}

OracleResult oracle_xi_integral() {
  const double a = 0.9;
  QuadOptions o;
  o.rel = 1e-12;
  const QuadResult q = integrate(
      [a](double x) { return std::pow(1.0 + a * x, -1.5); }, -1.0, 1.0, o);
  return make("xi-integral", "closed form at |phat|=0.9",
              angular_xi_integral(a), "pi * quadrature of (1+a x)^{-3/2}",
              M_PI * q.value);
}

OracleResult oracle_chord() {
  const double a = 0.7;
  QuadOptions o;
  o.rel = 1e-12;
  // u^2 = a - x turns the endpoint singularities into a smooth integrand:
  // int_{-a}^{a} dx / sqrt(a^2 - x^2) = int_0^{sqrt(a)} 4 du / sqrt(2a - u^2)
  const QuadResult q = integrate(
      [a](double u) { return 4.0 / std::sqrt(2.0 * a - u * u); }, 0.0, std::sqrt(a), o);
  return make("chord", "chord_integral(0.7)", chord_integral(a),
              "desingularized quadrature of 1/sqrt(a^2-x^2)", q.value);
}

OracleResult oracle_angle_integral() {
  const double k = 0.8, lo = 0.1, hi = 0.4;
  QuadOptions o;
  o.rel = 1e-12;
  const QuadResult q = integrate(
      [k](double l) { return 1.0 / (1.0 - k * std::cos(l)); }, lo, hi, o);
  return make("angle-integral", "antiderivative on (0.1, 0.4), k=0.8",
              closed_angle_integral(k, lo, hi), "quadrature of 1/(1-k cos)",
              q.value);
}

OracleResult oracle_jacobian() {
  const double t = 3.0, psi = 0.4, r = 1.1;
  const double s = t - r - 2.0 * psi;
  return make("jacobian", "(t-s)^2 - r^2 on a cone point",
              (t - s) * (t - s) - r * r, "4 psi (r + psi)",
              4.0 * psi * (r + psi));
}

OracleResult oracle_xi_magnitude() {
  ConeFrame frame{3.0, Vec2{0.3, -0.2}};
  const double psi = 0.4, r = 1.1;
  return make("xi-magnitude", "|xi| from the cone chart",
              frame.xi_mag(psi, r), "r / (r + 2 psi)", r / (r + 2.0 * psi));
}

OracleResult oracle_cone_dual() {
  const double t = 2.0;
  auto g = [](double psi) { return std::exp(-2.0 * psi); };
  auto h = [](double r) { return r * r * std::exp(-r); };
  auto F_shell = [&](double psi, double r, double th) {
    return g(psi) * h(r) * (1.0 + 0.3 * std::sin(th));
  };
  auto F_solid = [&](double s, double r, double th) {
    return F_shell(0.5 * (t - s - r), r, th);
  };
  const QuadResult a = cone_shell_integral(F_shell, t, {}, {}, 1e-8, 40000000);
  const QuadResult b =
      cone_solid_integral(F_solid, t, 0.0, 0.5 * M_PI, 0.0, t, 1e-8, 40000000);
  return make("cone-dual", "(psi, r) chart", a.value, "(s, y) chart", b.value);
}

OracleResult oracle_p_moment() {
  const PMomentBound pm = p_moment_bound(40.0, 3.0);
  return make("p-moment", "exact 1/p0 moment on the rectangle", pm.exact,
              "P2 log(1+P) shape (constant " + std::to_string(pm.constant) +
                  ")",
              pm.bound);
}

OracleResult oracle_two_term() {
  const double t = 10.0, P = 1e4, P2 = 3.0;
  const double lg = std::log(P);
  const double C = std::pow(P2, 0.25) * std::pow(P, 0.75) * std::pow(lg, -0.75);
  const double lhs =
      t * P2 * std::pow(P, 1.5) / C + t * std::sqrt(P2) * std::pow(lg, 1.5) * C;
  return make("two-term", "middle pair at the optimizer C", lhs,
              "2 t (P2 P log P)^{3/4}",
              bound_formula("ks2_twoterm").value(t, P, P2, AngularSplit{}));
}

OracleResult oracle_young() {
  const double t = 3.0, P = 7.0, P2 = 1.5, K = 2.3;
  const double a = t * P2 * std::log(P);
  return make("young", "a sqrt(K), a = t P2 log P", a * std::sqrt(K),
              "a^2/2 + K/2 (must dominate)", 0.5 * a * a + 0.5 * K);
}

}  // namespace

const std::vector<std::string>& oracle_names() {
  static const std::vector<std::string> names = {
      "xi-integral", "chord",    "angle-integral", "jacobian", "xi-magnitude",
      "cone-dual",   "p-moment", "two-term",       "young"};
  return names;
}

OracleResult run_oracle(const std::string& name) {
  if (name == "xi-integral") return oracle_xi_integral();
  if (name == "chord") return oracle_chord();
  if (name == "angle-integral") return oracle_angle_integral();
  if (name == "jacobian") return oracle_jacobian();
  if (name == "xi-magnitude") return oracle_xi_magnitude();
  if (name == "cone-dual") return oracle_cone_dual();
  if (name == "p-moment") return oracle_p_moment();
  if (name == "two-term") return oracle_two_term();
  if (name == "young") return oracle_young();
  std::string all;
  for (const std::string& n : oracle_names()) all += " " + n;
  throw std::out_of_range("unknown oracle '" + name + "'; available:" + all);
}

}  // namespace rvm
