#include "rvm2d/markers.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "rvm2d/parallel.hpp"
#include "rvm2d/rng.hpp"

namespace rvm {

Vec2 lorentz_force(const Vec2& E, double B, const Vec2& p) {
  double p0 = std::sqrt(1.0 + p.norm2());
  return {E.x + (p.y / p0) * B, E.y - (p.x / p0) * B};
}

void MarkerEnsemble::reserve(std::size_t n) {
  x1.reserve(n); x2.reserve(n); p1.reserve(n); p2.reserve(n); w.reserve(n);
  p_initial.reserve(n); force_accum.reserve(n);
}

void MarkerEnsemble::push_back(double x1_, double x2_, double p1_, double p2_, double w_) {
  x1.push_back(x1_); x2.push_back(x2_); p1.push_back(p1_); p2.push_back(p2_);
  w.push_back(w_);
  p_initial.push_back(std::hypot(p1_, p2_));
  force_accum.push_back(0.0);
}

void InitialProfile::validate() const {
  if (kind != "anisotropic-gaussian-bump" && kind != "uniform-rectangle" && kind != "ring")
    throw std::invalid_argument("profile.kind must be anisotropic-gaussian-bump, "
                                "uniform-rectangle, or ring");
  if (!(spatial_radius > 0.0)) throw std::invalid_argument("profile.spatial_radius must be > 0");
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw std::invalid_argument("profile momentum extents must be > 0");
  if (a2 > a1) throw std::invalid_argument("profile requires a2 <= a1");
  if (!(amplitude > 0.0)) throw std::invalid_argument("profile.amplitude must be > 0");
}

double InitialProfile::p1_extent() const { return a1; }
double InitialProfile::p2_extent() const { return kind == "ring" ? a1 : a2; }

double InitialProfile::value(const Vec2& x, const Vec2& p) const {
  double r = x.norm();
  if (r > spatial_radius) return 0.0;
  if (kind == "uniform-rectangle") {
    if (std::abs(p.x) > a1 || std::abs(p.y) > a2) return 0.0;
    return amplitude;
  }
  if (kind == "ring") {
    double pm = p.norm();
    if (pm < a2 || pm > a1) return 0.0;
    return amplitude;
  }
  // anisotropic gaussian bump, truncated
  if (std::abs(p.x) > a1 || std::abs(p.y) > a2) return 0.0;
  double sx = spatial_radius / 3.0, s1 = a1 / 3.0, s2 = a2 / 3.0;
  return amplitude * std::exp(-0.5 * (r * r / (sx * sx) + p.x * p.x / (s1 * s1) +
                                      p.y * p.y / (s2 * s2)));
}

MarkerEnsemble sample_profile(const InitialProfile& prof, std::size_t count,
                              std::uint64_t seed) {
  prof.validate();
  if (count == 0) throw std::invalid_argument("sample_profile: count must be > 0");

  const double R = prof.spatial_radius;
  const double e1 = prof.p1_extent(), e2 = prof.p2_extent();
  const double box_vol = (2 * R) * (2 * R) * (2 * e1) * (2 * e2);
  LowDiscrepancy4 seq(seed);

  // quadrature sampling: fixed low-discrepancy nodes, weight = f * V / N
  std::vector<double> vx1(count), vx2(count), vp1(count), vp2(count), vw(count);
  parallel_chunks(count, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Vec2 x{(2.0 * seq.point(i, 0) - 1.0) * R, (2.0 * seq.point(i, 1) - 1.0) * R};
      Vec2 p{(2.0 * seq.point(i, 2) - 1.0) * e1, (2.0 * seq.point(i, 3) - 1.0) * e2};
      vx1[i] = x.x; vx2[i] = x.y; vp1[i] = p.x; vp2[i] = p.y;
      vw[i] = prof.value(x, p) * box_vol / static_cast<double>(count);
    }
  });

  double wmax = 0.0;
  for (double v : vw) wmax = std::max(wmax, v);
  if (wmax <= 0.0) throw std::runtime_error("sample_profile: profile vanished on all nodes");
  const double floor = 1e-12 * wmax;

  MarkerEnsemble m;
  m.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    if (vw[i] > floor) m.push_back(vx1[i], vx2[i], vp1[i], vp2[i], vw[i]);
  return m;
}

void push_markers(MarkerEnsemble& m, const FieldState& f, double dt,
                  std::vector<double>* x1_before, std::vector<double>* x2_before) {
  const std::size_t n = m.size();
  if (x1_before) { x1_before->assign(m.x1.begin(), m.x1.end()); }
  if (x2_before) { x2_before->assign(m.x2.begin(), m.x2.end()); }

  const double L = f.half_width();
  std::atomic<std::size_t> bad{n};

  parallel_chunks(n, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Vec2 x{m.x1[i], m.x2[i]};
      Vec2 E{f.sample_E1(x), f.sample_E2(x)};
      double B = f.sample_B(x);

      // record |K| along the path before the kick
      Vec2 K = lorentz_force(E, B, {m.p1[i], m.p2[i]});
      m.force_accum[i] += std::abs(dt) * K.norm();

      // half electric kick
      double q1 = m.p1[i] + 0.5 * dt * E.x;
      double q2 = m.p2[i] + 0.5 * dt * E.y;
      // exact magnetic rotation through dt*B/p0 (clockwise for B > 0)
      double p0 = std::sqrt(1.0 + q1 * q1 + q2 * q2);
      double ang = dt * B / p0;
      double c = std::cos(ang), s = std::sin(ang);
      double r1 = c * q1 + s * q2;
      double r2 = -s * q1 + c * q2;
      // half electric kick
      double n1 = r1 + 0.5 * dt * E.x;
      double n2 = r2 + 0.5 * dt * E.y;

      double np0 = std::sqrt(1.0 + n1 * n1 + n2 * n2);
      double nx1 = x.x + dt * n1 / np0;
      double nx2 = x.y + dt * n2 / np0;

      if (!std::isfinite(n1) || !std::isfinite(n2) || !std::isfinite(nx1) ||
          !std::isfinite(nx2)) {
        std::size_t expect = n;
        while (!bad.compare_exchange_weak(expect, std::min(expect, i))) {}
        continue;
      }
      // periodic wrap into [-L, L)
      nx1 -= 2.0 * L * std::floor((nx1 + L) / (2.0 * L));
      nx2 -= 2.0 * L * std::floor((nx2 + L) / (2.0 * L));
      m.p1[i] = n1; m.p2[i] = n2; m.x1[i] = nx1; m.x2[i] = nx2;
    }
  });

  std::size_t first_bad = bad.load();
  if (first_bad != n)
    throw std::runtime_error("push_markers: non-finite update at marker " +
                             std::to_string(first_bad));
  m.t += dt;
}

void desynchronize_momenta(MarkerEnsemble& m, const FieldState& f) {
  const double dt = f.dt();
  parallel_chunks(m.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Vec2 x{m.x1[i], m.x2[i]};
      Vec2 E{f.sample_E1(x), f.sample_E2(x)};
      double B = f.sample_B(x);
      // Boris with -dt/2: p^0 -> p^{-1/2}; no drift, no |K| accumulation
      double h = -0.25 * dt;
      double q1 = m.p1[i] + h * E.x;
      double q2 = m.p2[i] + h * E.y;
      double p0 = std::sqrt(1.0 + q1 * q1 + q2 * q2);
      double ang = -0.5 * dt * B / p0;
      double c = std::cos(ang), s = std::sin(ang);
      double r1 = c * q1 + s * q2;
      double r2 = -s * q1 + c * q2;
      m.p1[i] = r1 + h * E.x;
      m.p2[i] = r2 + h * E.y;
    }
  });
}

InequalityReport verify_momentum_inequality(const MarkerEnsemble& m, double slack) {
  InequalityReport rep;
  rep.checked = m.size();
  for (std::size_t i = 0; i < m.size(); ++i) {
    double bound = m.p_initial[i] + m.force_accum[i] + slack;
    double margin = bound - std::hypot(m.p1[i], m.p2[i]);
    if (margin < 0.0) {
      ++rep.violations;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_index = i;
      }
    }
  }
  return rep;
}

}  // namespace rvm
