#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "rvm2d/markers.hpp"
#include "rvm2d/quadrature.hpp"
#include "rvm2d/vec.hpp"

namespace rvm {

// Analytic phase-space density f(s, y, p), supported in the momentum
// rectangle [-P, P] x [-P2, P2] and bounded by f_max.
struct DensityModel {
  std::function<double(double, const Vec2&, const Vec2&)> f;
  double P = 1.0;
  double P2 = 1.0;
  double f_max = 1.0;
};

struct MomentOptions {
  double rel = 1e-6;
  long max_evals = 400000;
  // momentum-angle wedge; defaults to the full circle
  double theta_lo = -M_PI;
  double theta_hi = M_PI;
  // direction where (1 + phat.xi) degenerates, used as a refinement anchor
  double singular_theta = std::nan("");
};

// Momentum integrals of f at a spacetime point: quadrature for analytic
// densities, weighted marker sums for simulation data — one contract.
class PhaseSource {
 public:
  virtual ~PhaseSource() = default;

  // integral over p of g(p) f(s, y, p) dp, restricted to the angular wedge
  virtual QuadResult momentum_moment(double s, const Vec2& y,
                                     const std::function<double(const Vec2&)>& g,
                                     const MomentOptions& opt) const = 0;

  virtual double extent_p1() const = 0;  // P
  virtual double extent_p2() const = 0;  // P2
  virtual double sup_density() const = 0;
};

// Polar-coordinate adaptive quadrature over the momentum rectangle, with
// breakpoints at the rectangle corners and at the singular direction.
class AnalyticSource : public PhaseSource {
 public:
  explicit AnalyticSource(DensityModel model) : model_(std::move(model)) {}

  QuadResult momentum_moment(double s, const Vec2& y,
                             const std::function<double(const Vec2&)>& g,
                             const MomentOptions& opt) const override;

  double extent_p1() const override { return model_.P; }
  double extent_p2() const override { return model_.P2; }
  double sup_density() const override { return model_.f_max; }

 private:
  DensityModel model_;
};

// Marker trajectories stored at a diagnostic stride; linear interpolation
// between snapshots.  Optionally subsampled (every k-th marker, weights
// scaled by k) to bound memory.
class ParticleHistory {
 public:
  ParticleHistory(std::size_t marker_stride = 1) : stride_(marker_stride < 1 ? 1 : marker_stride) {}

  void record(const MarkerEnsemble& m);

  std::size_t snapshots() const { return times_.size(); }
  double t_begin() const;
  double t_end() const;
  std::size_t marker_count() const { return w_.size(); }

  // state of subsampled marker i at time s (clamped linear interpolation)
  void state_at(double s, std::size_t i, Vec2& x, Vec2& p) const;
  double weight(std::size_t i) const { return w_[i]; }
  double normalization() const { return norm_; }

 private:
  std::size_t stride_;
  double norm_ = 4.0 * M_PI;
  std::vector<double> times_;
  std::vector<std::vector<double>> x1_, x2_, p1_, p2_;
  std::vector<double> w_;
};

// f as an empirical measure: moments are sums over markers smoothed with the
// deposition shape of width `smoothing` (the field mesh width).
class MarkerSource : public PhaseSource {
 public:
  MarkerSource(std::shared_ptr<const ParticleHistory> hist, double smoothing);

  QuadResult momentum_moment(double s, const Vec2& y,
                             const std::function<double(const Vec2&)>& g,
                             const MomentOptions& opt) const override;

  double extent_p1() const override;
  double extent_p2() const override;
  double sup_density() const override;

 private:
  std::shared_ptr<const ParticleHistory> hist_;
  double h_;
};

}  // namespace rvm
