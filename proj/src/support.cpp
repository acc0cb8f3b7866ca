#include "rvm2d/support.hpp"

#include <cmath>
#include <stdexcept>

namespace rvm {

SupportEnvelope::SupportEnvelope(double w, double weight_floor_ratio)
    : w_(w), weight_floor_ratio_(weight_floor_ratio) {
  if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("SupportEnvelope: w must be in (0,1)");
}

const SupportSample& SupportEnvelope::update(double t, const std::vector<double>& p1,
                                             const std::vector<double>& p2,
                                             const std::vector<double>& weight) {
  if (!samples_.empty() && t < samples_.back().t)
    throw std::invalid_argument("SupportEnvelope: sample times must be nondecreasing");
  if (p1.size() != p2.size() || p1.size() != weight.size())
    throw std::invalid_argument("SupportEnvelope: array size mismatch");

  double wmax = 0.0;
  for (double w : weight) wmax = std::max(wmax, std::abs(w));
  const double floor = weight_floor_ratio_ * wmax;

  double pt = ptilde_, pp2 = p2_;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (std::abs(weight[i]) <= floor) continue;
    pt = std::max(pt, std::hypot(p1[i], p2[i]));
    pp2 = std::max(pp2, std::abs(p2[i]));
  }
  ptilde_ = pt;
  p2_ = pp2;
  samples_.push_back({t, ptilde_, p2_, ptilde_ + std::pow(p2_, 1.0 / w_)});
  return samples_.back();
}

const SupportSample& SupportEnvelope::update_measured(double t, double pmax, double p2max) {
  if (!samples_.empty() && t < samples_.back().t)
    throw std::invalid_argument("SupportEnvelope: sample times must be nondecreasing");
  ptilde_ = std::max(ptilde_, pmax);
  p2_ = std::max(p2_, p2max);
  samples_.push_back({t, ptilde_, p2_, ptilde_ + std::pow(p2_, 1.0 / w_)});
  return samples_.back();
}

bool SupportEnvelope::ratio_ok(double delta_slack) const {
  // P2 <= P^w, stated in ratio form P2 / P^{w+delta} <= P^{-delta}
  for (const auto& s : samples_) {
    if (s.P <= 0.0) continue;
    double lhs = s.p2 * std::pow(s.P, delta_slack);
    double rhs = std::pow(s.P, w_ + delta_slack);
    if (lhs > rhs * (1.0 + 1e-12)) return false;
  }
  return true;
}

}  // namespace rvm
