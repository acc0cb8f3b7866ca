#pragma once

#include <functional>
#include <vector>

#include "rvm2d/history.hpp"
#include "rvm2d/quadrature.hpp"
#include "rvm2d/source.hpp"
#include "rvm2d/vec.hpp"

namespace rvm {

// Backward lightcone chart from apex (t, x).  Points are addressed either by
// emission time and offset (s, y) or by the depth/radius pair
//   psi = (t - s - r)/2,   r = |y - x|,
// for which data on the cone satisfy
//   s = t - r - 2 psi,   |xi| = r/(r + 2 psi),   (t-s)^2 - r^2 = 4 psi (r + psi),
// with xi = (y - x)/(t - s).
struct ConeFrame {
  double t = 0.0;
  Vec2 x;

  double s_of(double psi, double r) const { return t - r - 2.0 * psi; }
  double psi_of(double s, double r) const { return 0.5 * (t - s - r); }
  double xi_mag(double psi, double r) const { return r / (r + 2.0 * psi); }
  Vec2 point(double r, double theta) const {
    return {x.x + r * std::cos(theta), x.y + r * std::sin(theta)};
  }
  double lorentz_distance2(double s, double r) const { return (t - s) * (t - s) - r * r; }
};

// Field values along the cone: analytic models and recorded histories behind
// one callback.
struct FieldModel {
  std::function<FieldSample(double, const Vec2&)> at;

  double force_mag(double s, const Vec2& y) const {
    FieldSample f = at(s, y);
    return std::hypot(f.e1, f.e2) + std::abs(f.b);
  }
  double kg(double s, const Vec2& y, const Vec2& omega) const {
    FieldSample f = at(s, y);
    return Kg({f.e1, f.e2}, f.b, omega);
  }
};

FieldModel model_from_history(const FieldHistory& h);
FieldModel model_constant(const Vec2& E, double B);

// sigma_S(s, y, xi) = \int f / (p0 (1 + phat.xi)) dp;  |xi| <= 1 required.
QuadResult sigma_S(double s, const Vec2& y, const Vec2& xi, const PhaseSource& src,
                   const MomentOptions& opt = {});

// Angular split scales with derived half-angles alpha = P2/A_split,
// beta = P2/B_split, gamma = P2/C_split.  The _split suffix keeps the
// magnetic field's name free.  Feasible splits satisfy
// 4 B_split <= 2 A_split <= C_split, P^{w+delta} < each scale < P, and all
// angles < pi/4.
struct AngularSplit {
  double A_split = 0.0, B_split = 0.0, C_split = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double t = 0.0, P = 0.0, P2 = 0.0;
  bool degenerate = false;  // fallback when no feasible window exists

  void validate(double w_plus_delta) const;  // throws std::invalid_argument
};

AngularSplit degenerate_split(double t, double P, double P2);

// ---- cone integrals ----------------------------------------------------

// \int F(psi, r, theta) r / (sqrt(psi) sqrt(r+psi)) dtheta dr dpsi over
// psi in (0, t/2), r in (0, t - 2 psi), theta in the given arcs; the
// 1/sqrt(psi) endpoint is removed by psi = zeta^2.  psi_breaks seed
// refinement at the analysis' split depths.
QuadResult cone_shell_integral(
    const std::function<double(double, double, double)>& F, double t,
    const std::vector<std::pair<double, double>>& theta_arcs,
    const std::vector<double>& psi_breaks, double rel, long budget);

// Same region through the (s, y) chart:
// \int F(s, r, theta) r / sqrt((t-s)^2 - r^2) dtheta dr ds, the radial
// square root removed by r = (t-s) sin(eta).
QuadResult cone_solid_integral(
    const std::function<double(double, double, double)>& F, double t,
    double eta_lo, double eta_hi, double s_lo, double s_hi, double rel, long budget);

// ---- force decomposition pieces ----------------------------------------

// K_T: data term, fields not involved.
QuadResult eval_KT(double t, const Vec2& x, const PhaseSource& src, double rel = 1e-3,
                   long budget = 50000000);

struct KS1Result {
  QuadResult total;
  double interior = 0.0, shell = 0.0, corner = 0.0;
  double eps = 0.0;    // shell thickness
  double delta = 0.0;  // corner depth
};

// K_S1: |K|-weighted moment over the solid cone, split interior/shell/corner
// at radius t-s-eps and time t-delta (defaults 1/t, clamped to the cone).
KS1Result eval_KS1(double t, const Vec2& x, const PhaseSource& src, const FieldModel& fields,
                   double eps = -1.0, double delta = -1.0, double rel = 1e-3,
                   long budget = 50000000);

struct KS2Result {
  QuadResult total;
  double piece[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // [phi window][theta window]
  bool split_applied = false;
  double eps_psi[4] = {0.0, 0.0, 0.0, 0.0};
};

// K_S2: sigma_S * Kg over the cone interior in the (psi, r) chart.  With a
// feasible split the four angular pieces are integrated separately (their sum
// is the total); otherwise one full pass.
KS2Result eval_KS2(double t, const Vec2& x, const PhaseSource& src, const FieldModel& fields,
                   const AngularSplit* splits = nullptr, double rel = 1e-3,
                   long budget = 80000000);

// psi-split depths used in the four-piece analysis, clamped to (0, t/2)
void psi_split_depths(const AngularSplit& sp, double eps_out[4]);

// ---- apex report ---------------------------------------------------------

struct DecompositionResult {
  double t = 0.0;
  Vec2 x;
  QuadResult KT;
  KS1Result KS1;
  KS2Result KS2;
  AngularSplit splits;
};

struct DecomposeOptions {
  double rel = 1e-2;
  const AngularSplit* splits = nullptr;  // optional; degenerate fallback otherwise
};

DecompositionResult decompose_apex(double t, const Vec2& x, const PhaseSource& src,
                                   const FieldModel& fields, const DecomposeOptions& opt);

}  // namespace rvm
