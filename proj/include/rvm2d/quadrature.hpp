#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace rvm {

// Gauss 7 / Kronrod 15 pair (QUADPACK dqk15 abscissae and weights).
namespace gk {
inline constexpr double xgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr double wgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679,  0.1903505780647854,  0.2044329400752989, 0.2094821410847278};
inline constexpr double wg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};
}  // namespace gk

struct QuadOptions {
  double rel = 1e-8;        // relative target on the whole integral
  double abs = 1e-300;      // absolute floor for the target
  int max_depth = 60;       // bisection depth (55+ resolves 1/sqrt endpoints to 1e-8)
  long max_evals = 4000000; // integrand evaluation budget
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;   // accumulated local error estimates
  long evals = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    evals += o.evals;
    converged = converged && o.converged;
    return *this;
  }
};

// One Kronrod-15 panel with the QUADPACK error estimate.
template <class F>
inline void gk15_panel(F&& f, double a, double b, double& val, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * gk::xgk[i]);
    fv[14 - i] = f(c + h * gk::xgk[i]);
  }
  fv[7] = f(c);
  double resk = 0.0, resg = 0.0, resabs = 0.0;
  for (int i = 0; i < 7; ++i) {
    resk += gk::wgk[i] * (fv[i] + fv[14 - i]);
    resabs += gk::wgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
  }
  resk += gk::wgk[7] * fv[7];
  resabs += gk::wgk[7] * std::abs(fv[7]);
  for (int i = 0; i < 3; ++i) resg += gk::wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  resg += gk::wg[3] * fv[7];

  const double mean = resk * 0.5;
  double resasc = gk::wgk[7] * std::abs(fv[7] - mean);
  for (int i = 0; i < 7; ++i)
    resasc += gk::wgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
  resasc *= std::abs(h);

  val = resk * h;
  err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * 2.220446049250313e-16 * resabs * std::abs(h);
  if (err < eps50) err = eps50;
}

namespace detail {

template <class F>
void adapt(F&& f, double a, double b, double tol, int depth, const QuadOptions& o,
           QuadResult& out) {
  double v, e;
  gk15_panel(f, a, b, v, e);
  out.evals += 15;
  if (e <= tol || depth >= o.max_depth || out.evals >= o.max_evals) {
    out.value += v;
    out.error += e;
    if (e > tol && depth < o.max_depth) out.converged = false;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * tol, depth + 1, o, out);
  adapt(f, m, b, 0.5 * tol, depth + 1, o, out);
}

}  // namespace detail

// Adaptive integral of f over [a, b].  Deterministic: depth-first bisection
// with a fixed rule, independent of thread count and evaluation timing.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& o = {}) {
  QuadResult out;
  if (a == b) return out;
  double v0, e0;
  gk15_panel(f, a, b, v0, e0);
  out.evals = 15;
  const double target = std::max(o.abs, o.rel * std::abs(v0));
  if (e0 <= target) {
    out.value = v0;
    out.error = e0;
    return out;
  }
  const double m = 0.5 * (a + b);
  detail::adapt(f, a, m, 0.5 * target, 1, o, out);
  detail::adapt(f, m, b, 0.5 * target, 1, o, out);
  return out;
}

// Same, with interior breakpoints (known kinks or near-singular directions).
template <class F>
QuadResult integrate_split(F&& f, const std::vector<double>& pts, const QuadOptions& o = {}) {
  QuadResult out;
  if (pts.size() < 2) return out;
  // scale pass to set an absolute target shared across the pieces
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double v, e;
    gk15_panel(f, pts[i], pts[i + 1], v, e);
    scale += std::abs(v);
    out.evals += 15;
  }
  const double target = std::max(o.abs, o.rel * scale);
  const double per = target / static_cast<double>(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    detail::adapt(f, pts[i], pts[i + 1], per, 0, o, out);
  return out;
}

// Iterated 2D integral over [ax,bx] x [ay,by]; inner axis is y.
template <class F2>
QuadResult integrate_2d(F2&& f, double ax, double bx, double ay, double by,
                        const QuadOptions& o = {}) {
  QuadOptions inner = o;
  inner.rel = std::max(o.rel * 0.05, 1e-12);
  long evals = 0;
  bool inner_ok = true;
  auto outer = [&](double x) {
    QuadResult r = integrate([&](double y) { return f(x, y); }, ay, by, inner);
    evals += r.evals;
    inner_ok = inner_ok && r.converged;
    return r.value;
  };
  QuadOptions oo = o;
  oo.max_evals = o.max_evals / 64 + 64;  // outer counts nodes, not leaf evals
  QuadResult r = integrate(outer, ax, bx, oo);
  r.evals = evals;
  r.converged = r.converged && inner_ok;
  return r;
}

}  // namespace rvm
