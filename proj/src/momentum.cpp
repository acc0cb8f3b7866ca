#include "rvm2d/momentum.hpp"

#include <cmath>
#include <stdexcept>

namespace rvm {

Momentum gamma_factors(const Vec2& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y))
    throw std::domain_error("gamma_factors: non-finite momentum");
  Momentum m;
  m.p = p;
  m.p0 = std::sqrt(1.0 + p.norm2());
  m.phat = {p.x / m.p0, p.y / m.p0};
  return m;
}

}  // namespace rvm
