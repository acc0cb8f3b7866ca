#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rvm2d/fields.hpp"
#include "rvm2d/vec.hpp"

namespace rvm {

// K(t,x,p) = (E1 + phat2 B, E2 - phat1 B); |K| <= |E| + |B|.
Vec2 lorentz_force(const Vec2& E, double B, const Vec2& p);

// Marker ensemble, structure-of-arrays.  Weights are bare samples of f and
// stay constant; `normalization` carries the 4*pi factor of the source terms.
// Leapfrog layout: positions live at integer steps, momenta half a step
// behind (time() tags the position level).
struct MarkerEnsemble {
  std::vector<double> x1, x2, p1, p2, w;
  // per-marker bookkeeping for the momentum inequality
  std::vector<double> p_initial;    // |p| at start
  std::vector<double> force_accum;  // running sum of dt * |K| along the path
  double normalization = 4.0 * M_PI;
  double t = 0.0;

  std::size_t size() const { return w.size(); }
  double time() const { return t; }
  void reserve(std::size_t n);
  void push_back(double x1_, double x2_, double p1_, double p2_, double w_);
};

// Initial phase-space profiles, compactly supported:
//   anisotropic-gaussian-bump: gaussian in x (truncated at spatial_radius) and
//     in p with sigma_i = a_i / 3 (truncated at the momentum rectangle)
//   uniform-rectangle: constant on {|x| <= spatial_radius} x [-a1,a1]x[-a2,a2]
//   ring: constant on {|x| <= spatial_radius} x {a2 <= |p| <= a1}
struct InitialProfile {
  std::string kind = "anisotropic-gaussian-bump";
  double spatial_radius = 1.0;
  double a1 = 1.0;  // momentum half-extent along p1
  double a2 = 1.0;  // momentum half-extent along p2, a2 <= a1
  double amplitude = 1.0;

  void validate() const;
  double value(const Vec2& x, const Vec2& p) const;
  // phase-space sampling box half-extents (momentum part)
  double p1_extent() const;
  double p2_extent() const;
};

// Deterministic low-discrepancy sampling: marker i sits at the i-th point of
// a seeded 4D additive sequence over the support box, with weight
// f(x,p) * box_volume / count.  Weights below 1e-12 * max are dropped.
MarkerEnsemble sample_profile(const InitialProfile& prof, std::size_t count,
                              std::uint64_t seed);

// One leapfrog push: gather E,B at x^n, Boris kick-rotate-kick
// (p^{n-1/2} -> p^{n+1/2}, magnetic rotation through the exact angle
// dt*B/p0), then drift x += dt * phat.  Positions wrap periodically.
// x_before, if given, receives the pre-drift positions for deposition.
// Throws std::runtime_error naming the first marker that went non-finite.
void push_markers(MarkerEnsemble& m, const FieldState& f, double dt,
                  std::vector<double>* x1_before = nullptr,
                  std::vector<double>* x2_before = nullptr);

// Half-step the momenta backwards with frozen fields (leapfrog start-up).
void desynchronize_momenta(MarkerEnsemble& m, const FieldState& f);

// |p(t)| <= |p(0)| + integral |K| ds + slack, per marker.
struct InequalityReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;     // most negative (bound - |p|), 0 if none
  std::size_t worst_index = 0;
};
InequalityReport verify_momentum_inequality(const MarkerEnsemble& m, double slack);

}  // namespace rvm
