#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rvm2d/markers.hpp"
#include "rvm2d/vec.hpp"

namespace rvm {

struct ApexSpec {
  double t = 0.0;
  Vec2 x;
};

// Full description of one run.  Text form is key=value with dotted section
// prefixes; '#' starts a comment.  Unknown keys are rejected so stale
// configs fail loudly.
struct RunConfig {
  int nx = 64, ny = 64;
  double half_width = 12.8;  // domain [-L, L)^2
  double dt_safety = 0.9;    // dt = dt_safety * CFL limit of the mesh
  long steps = 400;
  std::size_t markers = 100000;
  InitialProfile profile;
  std::uint64_t seed = 1;
  long dump_every = 0;  // snapshot cadence in steps; 0 = first/last only
  long diag_every = 1;  // ledger / envelope cadence in steps
  std::vector<ApexSpec> apexes;
  double quad_rel = 1e-2;  // decomposition quadrature tolerance
  // angular split overrides; all three set (> 0) or all unset
  double split_A = 0.0, split_B = 0.0, split_C = 0.0;
  double w = 1.0 / 3.0;       // composite support exponent
  double ratio_slack = 0.05;  // delta in the P2 <= P^{w+delta} check
  int history_stride = 1;     // field history recording stride (steps)
  std::size_t history_marker_stride = 1;  // particle history subsampling
  bool emit_plots = true;

  double dx() const { return 2.0 * half_width / nx; }
  double dy() const { return 2.0 * half_width / ny; }
  double dt() const;
  double duration() const { return steps * dt(); }

  // Throws std::invalid_argument naming the violated rule ("cfl",
  // "no-wrap", ...).
  void validate() const;

  // Effective configuration, one key=value per line, fixed order.
  std::string echo() const;
};

// Parse + validate.  Parse failures throw std::runtime_error carrying
// "<name>:<line>: <message>"; rule violations propagate from validate().
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& in, const std::string& name);

}  // namespace rvm
