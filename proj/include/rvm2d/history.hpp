#pragma once

#include <vector>

#include "rvm2d/fields.hpp"
#include "rvm2d/vec.hpp"

namespace rvm {

struct FieldSample {
  double e1 = 0.0, e2 = 0.0, b = 0.0;
};

struct ConeNode {
  double s = 0.0;  // emission time
  Vec2 y;          // emission point, |y - x| = t - s up to the cone tolerance
};

// Time-stamped field snapshots, linearly interpolated in t and bilinearly in
// space.  The stride adapts so that long runs keep a bounded snapshot count
// while short runs keep every step.
class FieldHistory {
 public:
  FieldHistory(int nx, int ny, double half_width, int stride = 1);

  void record(const FieldState& state);

  // Fields at an arbitrary event inside the recorded span.
  FieldSample sample(double s, const Vec2& y) const;

  // Values at backward-lightcone nodes from apex (t, x).  Every node must
  // satisfy | |y-x| - (t-s) | <= cone_tol (default: one mesh width) and lie
  // inside the recorded time span; violations throw std::invalid_argument.
  std::vector<FieldSample> sample_on_cone(double t, const Vec2& x,
                                          const std::vector<ConeNode>& nodes,
                                          double cone_tol = -1.0) const;

  double t_begin() const;
  double t_end() const;
  std::size_t size() const { return times_.size(); }
  int stride() const { return stride_; }
  double dx() const { return dx_; }

  // |K|(s,y) = |E| + |B|, the field magnitude entering the force bounds
  double force_magnitude(double s, const Vec2& y) const;

 private:
  int nx_, ny_, stride_;
  double L_, dx_, dy_;
  std::vector<double> times_;
  std::vector<Grid2D> e1_, e2_, b_;
  long step_counter_ = 0;

  FieldSample sample_snap(std::size_t k, const Vec2& y) const;
};

// Transverse null-frame field magnitude:
//   Kg^2 = |E . omega|^2 + |B + omega1 E2 - omega2 E1|^2
// with omega a unit vector (checked to 1e-12).  Vanishes on outgoing null
// configurations and is controlled by the cone energy identity.
double Kg(const Vec2& E, double B, const Vec2& omega);

}  // namespace rvm
