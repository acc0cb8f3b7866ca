#include "rvm2d/gs_decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rvm {

namespace {

// Shared evaluation budget across nested quadrature levels.  Once exhausted,
// integrands return zero and the result is flagged non-converged; values are
// never silently truncated into a "converged" answer.
struct EvalBudget {
  long remaining = 0;
  bool ok = true;
  void charge(long n) {
    remaining -= n;
    if (remaining < 0) ok = false;
  }
};

std::vector<double> chain_points(double a, double b, const std::vector<double>& breaks) {
  std::vector<double> in;
  const double margin = 1e-12 * (std::abs(b - a) + 1.0);
  for (double c : breaks)
    if (c > a + margin && c < b - margin) in.push_back(c);
  std::sort(in.begin(), in.end());
  std::vector<double> pts{a};
  for (double c : in)
    if (c - pts.back() > margin) pts.push_back(c);
  pts.push_back(b);
  return pts;
}

constexpr long kNoCallLimit = std::numeric_limits<long>::max() / 2;

}  // namespace

FieldModel model_from_history(const FieldHistory& h) {
  FieldModel m;
  m.at = [hp = &h](double s, const Vec2& y) { return hp->sample(s, y); };
  return m;
}

FieldModel model_constant(const Vec2& E, double B) {
  FieldModel m;
  m.at = [E, B](double, const Vec2&) { return FieldSample{E.x, E.y, B}; };
  return m;
}

QuadResult sigma_S(double s, const Vec2& y, const Vec2& xi, const PhaseSource& src,
                   const MomentOptions& opt) {
  const double xm = xi.norm();
  if (!(xm <= 1.0 + 1e-12)) throw std::invalid_argument("sigma_S: requires |xi| <= 1");
  MomentOptions o = opt;
  if (std::isnan(o.singular_theta) && xm > 1e-14)
    o.singular_theta = std::atan2(-xi.y, -xi.x);
  auto g = [&xi](const Vec2& p) {
    const double p0 = std::sqrt(1.0 + p.norm2());
    const double den = 1.0 + (p.x * xi.x + p.y * xi.y) / p0;
    return 1.0 / (p0 * den);
  };
  return src.momentum_moment(s, y, g, o);
}

void AngularSplit::validate(double w_plus_delta) const {
  auto bad = [](const char* m) { throw std::invalid_argument(std::string("AngularSplit: ") + m); };
  if (!(t > 0.0) || !std::isfinite(t)) bad("t must be positive");
  if (!(P2 > 0.0)) bad("requires P2 > 0");
  if (degenerate) {
    if (!(alpha == beta && beta == gamma && alpha > 0.0))
      bad("degenerate split must carry equal positive angles");
    return;
  }
  if (!(P >= 2.0)) bad("requires P >= 2");
  const double floor_scale = std::pow(P, w_plus_delta);
  for (double v : {A_split, B_split, C_split})
    if (!(v > floor_scale && v < P))
      bad("window scales must lie strictly between P^{w+delta} and P");
  const double slack = 1.0 + 1e-12;
  if (!(4.0 * B_split <= 2.0 * A_split * slack && 2.0 * A_split <= C_split * slack))
    bad("requires 4 B_split <= 2 A_split <= C_split");
  if (std::abs(alpha - P2 / A_split) > 1e-9 * std::abs(alpha)) bad("alpha must equal P2/A_split");
  if (std::abs(beta - P2 / B_split) > 1e-9 * std::abs(beta)) bad("beta must equal P2/B_split");
  if (std::abs(gamma - P2 / C_split) > 1e-9 * std::abs(gamma)) bad("gamma must equal P2/C_split");
  for (double a : {alpha, beta, gamma})
    if (!(a > 0.0 && a <= 0.25 * M_PI + 1e-12)) bad("angles must lie in (0, pi/4]");
}

AngularSplit degenerate_split(double t, double P, double P2) {
  if (!(t > 0.0 && P > 0.0 && P2 > 0.0))
    throw std::invalid_argument("degenerate_split: t, P, P2 must be positive");
  AngularSplit sp;
  sp.t = t;
  sp.P = P;
  sp.P2 = P2;
  sp.alpha = sp.beta = sp.gamma = 0.25 * M_PI;
  sp.A_split = sp.B_split = sp.C_split = P2 / sp.alpha;
  sp.degenerate = true;
  return sp;
}

void psi_split_depths(const AngularSplit& sp, double eps_out[4]) {
  const double logP = std::log(sp.P);
  const double t = sp.t;
  eps_out[0] = t * sp.beta / sp.P;
  eps_out[1] = 1.0 / (t * std::pow(sp.B_split * sp.B_split + sp.P2 * logP, 2.0));
  eps_out[2] = t * sp.gamma / sp.P;
  eps_out[3] = 1.0 / (t * std::pow(sp.C_split * sp.C_split + sp.P2 * logP, 2.0));
  for (int k = 0; k < 4; ++k) eps_out[k] = std::min(eps_out[k], 0.499 * t);
}

QuadResult cone_shell_integral(const std::function<double(double, double, double)>& F, double t,
                               const std::vector<std::pair<double, double>>& theta_arcs,
                               const std::vector<double>& psi_breaks, double rel, long budget) {
  if (!(t > 0.0)) throw std::invalid_argument("cone_shell_integral: t must be positive");
  std::vector<std::pair<double, double>> arcs = theta_arcs;
  if (arcs.empty()) arcs.emplace_back(-M_PI, M_PI);

  EvalBudget bud{budget};
  bool ok = true;
  long fcalls = 0;

  QuadOptions oth;
  oth.rel = rel * 0.3;
  oth.max_evals = 15 * 48;
  QuadOptions ora;
  ora.rel = rel * 0.5;
  ora.max_evals = 15 * 64;
  QuadOptions oze;
  oze.rel = rel;
  oze.max_evals = 15 * 48;

  auto theta_int = [&](double psi, double r) {
    QuadResult acc;
    for (const auto& arc : arcs) {
      if (!(arc.second > arc.first)) continue;
      if (bud.remaining <= 0) {
        bud.ok = false;
        break;
      }
      QuadResult a = integrate(
          [&](double th) {
            ++fcalls;
            return F(psi, r, th);
          },
          arc.first, arc.second, oth);
      bud.charge(a.evals);
      acc += a;
    }
    ok = ok && acc.converged;
    return acc.value;
  };

  // psi = zeta^2 removes the 1/sqrt(psi) endpoint
  auto radial = [&](double zeta) {
    const double psi = zeta * zeta;
    const double rmax = t - 2.0 * psi;
    if (rmax <= 0.0) return 0.0;
    QuadResult a = integrate(
        [&](double r) { return theta_int(psi, r) * r / std::sqrt(r + psi); }, 0.0, rmax, ora);
    ok = ok && a.converged;
    return 2.0 * a.value;
  };

  std::vector<double> zbr;
  for (double e : psi_breaks)
    if (e > 0.0 && e < 0.5 * t) zbr.push_back(std::sqrt(e));
  const std::vector<double> zpts = chain_points(0.0, std::sqrt(0.5 * t), zbr);

  QuadResult out = integrate_split([&](double z) { return radial(z); }, zpts, oze);
  out.evals = fcalls;
  out.converged = out.converged && ok && bud.ok;
  return out;
}

QuadResult cone_solid_integral(const std::function<double(double, double, double)>& F, double t,
                               double eta_lo, double eta_hi, double s_lo, double s_hi, double rel,
                               long budget) {
  if (!(t > 0.0)) throw std::invalid_argument("cone_solid_integral: t must be positive");
  if (!(0.0 <= eta_lo && eta_lo < eta_hi && eta_hi <= 0.5 * M_PI + 1e-12))
    throw std::invalid_argument("cone_solid_integral: eta range must lie in [0, pi/2]");
  if (!(0.0 <= s_lo && s_lo < s_hi && s_hi <= t))
    throw std::invalid_argument("cone_solid_integral: s range must lie in [0, t]");

  EvalBudget bud{budget};
  bool ok = true;
  long fcalls = 0;

  QuadOptions oth;
  oth.rel = rel * 0.3;
  oth.max_evals = 15 * 48;
  QuadOptions oet;
  oet.rel = rel * 0.5;
  oet.max_evals = 15 * 64;
  QuadOptions osl;
  osl.rel = rel;
  osl.max_evals = 15 * 48;

  auto theta_int = [&](double s, double r) {
    if (bud.remaining <= 0) {
      bud.ok = false;
      return 0.0;
    }
    QuadResult a = integrate(
        [&](double th) {
          ++fcalls;
          return F(s, r, th);
        },
        -M_PI, M_PI, oth);
    bud.charge(a.evals);
    ok = ok && a.converged;
    return a.value;
  };

  // r = (t-s) sin(eta) turns r dr / sqrt((t-s)^2 - r^2) into (t-s) sin(eta) d(eta)
  auto s_int = [&](double s) {
    QuadResult a = integrate(
        [&](double eta) { return std::sin(eta) * theta_int(s, (t - s) * std::sin(eta)); }, eta_lo,
        eta_hi, oet);
    ok = ok && a.converged;
    return (t - s) * a.value;
  };

  QuadResult out = integrate(s_int, s_lo, s_hi, osl);
  out.evals = fcalls;
  out.converged = out.converged && ok && bud.ok;
  return out;
}

QuadResult eval_KT(double t, const Vec2& x, const PhaseSource& src, double rel, long budget) {
  if (!(t > 0.0)) throw std::invalid_argument("eval_KT: t must be positive");

  EvalBudget bud{budget};
  bool ok = true;
  long evals = 0;

  MomentOptions mo;
  mo.rel = std::max(rel * 0.1, 1e-10);
  mo.max_evals = 8000;

  QuadOptions oph;
  oph.rel = rel * 0.3;
  oph.max_evals = 15 * 64;
  QuadOptions oet;
  oet.rel = rel * 0.5;
  oet.max_evals = 15 * 64;
  QuadOptions osl;
  osl.rel = rel;
  osl.max_evals = 15 * 48;

  auto kernel = [&](double s, double eta, double phi) -> double {
    if (bud.remaining <= 0) {
      bud.ok = false;
      return 0.0;
    }
    const double rho = std::sin(eta);
    const Vec2 xi{rho * std::cos(phi), rho * std::sin(phi)};
    const Vec2 y{x.x + (t - s) * xi.x, x.y + (t - s) * xi.y};
    MomentOptions o = mo;
    o.singular_theta = std::atan2(-xi.y, -xi.x);
    QuadResult m = src.momentum_moment(
        s, y,
        [&](const Vec2& p) {
          const double p0 = std::sqrt(1.0 + p.norm2());
          const double den = 1.0 + (p.x * xi.x + p.y * xi.y) / p0;
          return 1.0 / (p0 * p0 * den * std::sqrt(den));
        },
        o);
    bud.charge(m.evals);
    evals += m.evals;
    ok = ok && m.converged;
    return m.value;
  };

  // split at phi = 0 so the kernel peaks along +-e1 sit at panel endpoints
  const std::vector<double> phi_pts = chain_points(-M_PI, M_PI, {0.0});
  auto phi_int = [&](double s, double eta) {
    QuadResult a = integrate_split([&](double phi) { return kernel(s, eta, phi); }, phi_pts, oph);
    ok = ok && a.converged;
    return a.value;
  };

  auto eta_int = [&](double s) {
    QuadResult a = integrate([&](double eta) { return std::sin(eta) * phi_int(s, eta); }, 0.0,
                             0.5 * M_PI, oet);
    ok = ok && a.converged;
    return a.value;
  };

  QuadResult out = integrate([&](double s) { return eta_int(s); }, 0.0, t, osl);
  out.evals = evals;
  out.converged = out.converged && ok && bud.ok;
  return out;
}

KS1Result eval_KS1(double t, const Vec2& x, const PhaseSource& src, const FieldModel& fields,
                   double eps, double delta, double rel, long budget) {
  if (!(t > 0.0)) throw std::invalid_argument("eval_KS1: t must be positive");
  if (eps <= 0.0) eps = 1.0 / t;
  if (delta <= 0.0) delta = 1.0 / t;
  eps = std::min(eps, 0.5 * t);
  delta = std::min(delta, 0.5 * t);

  EvalBudget bud{budget};
  bool ok = true;
  long evals = 0;

  MomentOptions mo;
  mo.rel = std::max(rel * 0.2, 1e-10);
  mo.max_evals = 4000;

  QuadOptions oth;
  oth.rel = rel * 0.3;
  oth.max_evals = 15 * 48;
  QuadOptions oet;
  oet.rel = rel * 0.5;
  oet.max_evals = 15 * 48;
  QuadOptions osl;
  osl.rel = rel;
  osl.max_evals = 15 * 32;

  auto F = [&](double s, double r, double th) -> double {
    if (bud.remaining <= 0) {
      bud.ok = false;
      return 0.0;
    }
    const Vec2 y{x.x + r * std::cos(th), x.y + r * std::sin(th)};
    const double fm = fields.force_mag(s, y);
    if (fm == 0.0) return 0.0;  // fields vanish over much of the cone
    QuadResult m = src.momentum_moment(
        s, y, [](const Vec2& p) { return 1.0 / std::sqrt(1.0 + p.norm2()); }, mo);
    bud.charge(m.evals);
    evals += m.evals;
    ok = ok && m.converged;
    return fm * m.value;
  };

  auto theta_int = [&](double s, double r) {
    QuadResult a = integrate([&](double th) { return F(s, r, th); }, -M_PI, M_PI, oth);
    ok = ok && a.converged;
    return a.value;
  };

  auto region = [&](double slo, double shi, auto&& elo, auto&& ehi) -> QuadResult {
    if (!(shi > slo)) return {};
    auto s_int = [&](double s) {
      const double lo = elo(s), hi = ehi(s);
      if (!(hi > lo)) return 0.0;
      QuadResult a = integrate(
          [&](double eta) { return std::sin(eta) * theta_int(s, (t - s) * std::sin(eta)); }, lo, hi,
          oet);
      ok = ok && a.converged;
      return (t - s) * a.value;
    };
    return integrate(s_int, slo, shi, osl);
  };

  // interior/shell boundary at r = t - s - eps
  auto eta_cut = [&](double s) {
    const double c = 1.0 - eps / (t - s);
    return c <= 0.0 ? 0.0 : std::asin(std::min(1.0, c));
  };
  auto zero = [](double) { return 0.0; };
  auto quarter = [](double) { return 0.5 * M_PI; };

  KS1Result R;
  R.eps = eps;
  R.delta = delta;
  QuadResult interior = region(0.0, t - delta, zero, eta_cut);
  QuadResult shell = region(0.0, t - delta, eta_cut, quarter);
  QuadResult corner = region(t - delta, t, zero, quarter);
  R.interior = interior.value;
  R.shell = shell.value;
  R.corner = corner.value;
  R.total = interior;
  R.total += shell;
  R.total += corner;
  R.total.evals = evals;
  R.total.converged = R.total.converged && ok && bud.ok;
  return R;
}

KS2Result eval_KS2(double t, const Vec2& x, const PhaseSource& src, const FieldModel& fields,
                   const AngularSplit* splits, double rel, long budget) {
  if (!(t > 0.0)) throw std::invalid_argument("eval_KS2: t must be positive");

  KS2Result R;
  EvalBudget bud{budget};
  bool ok = true;
  long evals = 0;

  MomentOptions base;
  base.rel = std::max(rel * 0.1, 1e-10);
  base.max_evals = 6000;

  auto sigma_kg = [&](double psi, double r, double th, double wlo, double whi) -> double {
    if (bud.remaining <= 0) {
      bud.ok = false;
      return 0.0;
    }
    const double s = t - r - 2.0 * psi;
    const Vec2 om{std::cos(th), std::sin(th)};
    const Vec2 y{x.x + r * om.x, x.y + r * om.y};
    const double kg = fields.kg(s, y, om);
    if (kg == 0.0) return 0.0;  // fields vanish over much of the cone
    const double xm = r / (r + 2.0 * psi);
    const Vec2 xi{om.x * xm, om.y * xm};
    MomentOptions o = base;
    o.theta_lo = wlo;
    o.theta_hi = whi;
    QuadResult sg = sigma_S(s, y, xi, src, o);
    bud.charge(sg.evals);
    evals += sg.evals;
    ok = ok && sg.converged;
    return sg.value * kg;
  };

  if (splits == nullptr) {
    QuadResult tot = cone_shell_integral(
        [&](double psi, double r, double th) { return sigma_kg(psi, r, th, -M_PI, M_PI); }, t, {},
        {}, rel, kNoCallLimit);
    R.total = tot;
    R.total.evals = evals;
    R.total.converged = tot.converged && ok && bud.ok;
    return R;
  }

  splits->validate(1.0 / 3.0);
  const double al = splits->alpha;
  const double be = splits->beta;
  const double ga = splits->gamma;

  std::vector<double> breaks;
  if (!splits->degenerate) {
    psi_split_depths(*splits, R.eps_psi);
    breaks.assign(R.eps_psi, R.eps_psi + 4);
  }

  // phi = angle(-xi); the xi window (piece index i) fixes the theta arcs of
  // the outer integral, the momentum wedge (piece index j) restricts sigma_S.
  const std::vector<std::pair<double, double>> arcs0 = {{-al, al}, {M_PI - al, M_PI + al}};
  const std::vector<std::pair<double, double>> arcs1 = {{al, M_PI - al},
                                                        {M_PI + al, 2.0 * M_PI - al}};

  auto piece = [&](int i, int j) {
    auto Fij = [&, i, j](double psi, double r, double th) {
      const double phi = wrap_angle(th + M_PI);
      const double a0 = (std::abs(phi) <= 0.5 * M_PI) ? 0.0 : M_PI;  // nearest of +-e1
      const double phe = wrap_angle(phi - a0);
      double wlo, whi;
      if (i == 0) {
        wlo = a0 + phe - be;
        whi = a0 + phe + be;
      } else {
        wlo = a0 - ga;
        whi = a0 + ga;
      }
      if (j == 1) {
        const double l = whi;
        const double h = wlo + 2.0 * M_PI;
        wlo = l;
        whi = h;
      }
      return sigma_kg(psi, r, th, wlo, whi);
    };
    return cone_shell_integral(Fij, t, (i == 0) ? arcs0 : arcs1, breaks, rel, kNoCallLimit);
  };

  QuadResult tot;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      QuadResult pr = piece(i, j);
      R.piece[i][j] = pr.value;
      tot += pr;
    }
  R.split_applied = true;
  R.total = tot;
  R.total.evals = evals;
  R.total.converged = tot.converged && ok && bud.ok;
  return R;
}

DecompositionResult decompose_apex(double t, const Vec2& x, const PhaseSource& src,
                                   const FieldModel& fields, const DecomposeOptions& opt) {
  DecompositionResult R;
  R.t = t;
  R.x = x;
  AngularSplit sp;
  if (opt.splits != nullptr) {
    sp = *opt.splits;
  } else {
    const double p2 = std::max(src.extent_p2(), 1e-6);
    const double ptilde = std::hypot(src.extent_p1(), src.extent_p2());
    sp = degenerate_split(t, ptilde + p2 * p2 * p2, p2);
  }
  R.splits = sp;
  R.KT = eval_KT(t, x, src, opt.rel);
  R.KS1 = eval_KS1(t, x, src, fields, -1.0, -1.0, opt.rel);
  R.KS2 = eval_KS2(t, x, src, fields, &sp, opt.rel);
  return R;
}

}  // namespace rvm
