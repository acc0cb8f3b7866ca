#pragma once

#include <cstddef>
#include <vector>

namespace rvm {

// Running extent of the momentum support:
//   Ptilde(t) = running max of |p|,  P2(t) = running max of |p2|,
//   P(t) = Ptilde + P2^{1/w}.
// Both maxima are nondecreasing by construction; the containment rectangle
// [-P, P] x [-P2, P2] therefore only grows.
struct SupportSample {
  double t = 0.0;
  double ptilde = 0.0;
  double p2 = 0.0;
  double P = 0.0;
};

class SupportEnvelope {
 public:
  // w in (0,1); weight_floor_ratio: markers with weight below
  // ratio * max_weight are ignored when measuring the support.
  explicit SupportEnvelope(double w = 1.0 / 3.0, double weight_floor_ratio = 1e-12);

  // Record the support at time t from marker momenta (p1, p2) and weights.
  // t must be >= the previous sample time (throws std::invalid_argument).
  // An empty (or fully sub-threshold) ensemble carries the maxima forward.
  const SupportSample& update(double t, const std::vector<double>& p1,
                              const std::vector<double>& p2,
                              const std::vector<double>& weight);

  // Record pre-measured extents (used when replaying CSV artifacts).
  const SupportSample& update_measured(double t, double pmax, double p2max);

  const std::vector<SupportSample>& samples() const { return samples_; }
  double w() const { return w_; }

  // P2 <= P^w, algebraically implied by P >= P2^{1/w}; asserted on samples.
  bool ratio_ok(double delta_slack) const;

 private:
  double w_;
  double weight_floor_ratio_;
  double ptilde_ = 0.0;
  double p2_ = 0.0;
  std::vector<SupportSample> samples_;
};

}  // namespace rvm
