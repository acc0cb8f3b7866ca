#include "rvm2d/cone_budget.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvm {

ConeBudget cone_Kg_budget(const FieldHistory& hist, double t, const Vec2& x,
                          int rings) {
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument(
        "cone_Kg_budget: apex time must be finite and nonnegative");
  if (rings < 1)
    throw std::invalid_argument("cone_Kg_budget: rings must be positive");

  ConeBudget out;
  if (t == 0.0) return out;  // degenerate cone: a point has no area

  const double slack = 1e-9 * std::max(1.0, t);
  if (hist.size() == 0 || hist.t_begin() > slack || hist.t_end() + slack < t)
    throw std::invalid_argument(
        "cone_Kg_budget: history span [" +
        (hist.size() ? std::to_string(hist.t_begin()) + ", " +
                           std::to_string(hist.t_end())
                     : std::string("empty")) +
        "] does not cover the cone [0, " + std::to_string(t) + "]");

  const double ds = t / rings;
  double sum = 0.0;
  std::vector<ConeNode> ring;
  for (int i = 0; i < rings; ++i) {
    const double s = std::min((i + 0.5) * ds, hist.t_end());
    const double r = t - s;
    const int ntheta =
        std::max(16, (int)std::ceil(2.0 * M_PI * r / hist.dx()));
    ring.assign(ntheta, ConeNode{});
    for (int j = 0; j < ntheta; ++j) {
      const double th = (j + 0.5) * 2.0 * M_PI / ntheta;
      ring[j].s = s;
      ring[j].y = Vec2{x.x + r * std::cos(th), x.y + r * std::sin(th)};
    }
    const std::vector<FieldSample> vals = hist.sample_on_cone(t, x, ring);
    const double dtheta = 2.0 * M_PI / ntheta;
    double ring_sum = 0.0;
    for (int j = 0; j < ntheta; ++j) {
      const Vec2 omega{(ring[j].y.x - x.x) / r, (ring[j].y.y - x.y) / r};
      const double kg =
          Kg(Vec2{vals[j].e1, vals[j].e2}, vals[j].b, omega);
      out.max_kg = std::max(out.max_kg, kg);
      ring_sum += kg * kg;
    }
    // dsigma = sqrt(2) r dr dtheta on this ring, dr = ds
    sum += ring_sum * std::sqrt(2.0) * r * ds * dtheta;
    out.nodes += (std::size_t)ntheta;
  }
  out.value = 0.25 * sum;
  return out;
}

bool cone_budget_flagged(const ConeBudget& budget, double calibration,
                         double factor) {
  if (!(calibration > 0.0))
    throw std::invalid_argument(
        "cone_budget_flagged: calibration constant must be positive");
  return budget.value > factor * calibration;
}

}  // namespace rvm
