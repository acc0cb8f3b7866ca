#pragma once

#include "rvm2d/vec.hpp"

namespace rvm {

// Relativistic kinematics with c = 1 and unit mass:
//   p0 = sqrt(1 + |p|^2),  velocity = p / p0,  |velocity| < 1 always.
struct Momentum {
  Vec2 p;
  double p0 = 1.0;
  Vec2 phat;
};

// Throws std::domain_error on non-finite input.
Momentum gamma_factors(const Vec2& p);

inline double energy_of(const Vec2& p) { return std::sqrt(1.0 + p.norm2()); }

}  // namespace rvm
