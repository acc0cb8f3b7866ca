#include "rvm2d/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rvm2d/fields.hpp"

namespace rvm {

double RunConfig::dt() const { return dt_safety * cfl_limit(dx(), dy()); }

void RunConfig::validate() const {
  auto fail = [](const std::string& rule, const std::string& msg) {
    throw std::invalid_argument("config rule '" + rule + "' violated: " + msg);
  };
  if (nx < 4 || ny < 4) fail("grid", "nx and ny must be at least 4");
  if (!(half_width > 0.0)) fail("grid", "half_width must be positive");
  if (!(dt_safety > 0.0) || dt_safety > 1.0)
    fail("cfl", "dt_safety must lie in (0, 1]; dt = dt_safety * dx/sqrt(2) "
                "keeps the field update stable");
  if (steps < 0) fail("time", "steps must be nonnegative");
  if (markers < 1) fail("markers", "marker count must be positive");
  profile.validate();
  if (diag_every < 1) fail("diag", "diag cadence must be at least 1 step");
  if (dump_every < 0) fail("dump", "dump cadence must be nonnegative");
  if (!(quad_rel > 0.0) || quad_rel >= 1.0)
    fail("quad", "quadrature tolerance must lie in (0, 1)");
  if (!(w > 0.0) || w >= 1.0) fail("support", "w must lie in (0, 1)");
  if (ratio_slack < 0.0) fail("support", "ratio_slack must be nonnegative");
  if (history_stride < 1) fail("history", "history stride must be positive");
  if (history_marker_stride < 1)
    fail("history", "history marker stride must be positive");

  const int set = (split_A > 0.0) + (split_B > 0.0) + (split_C > 0.0);
  if (set != 0 && set != 3)
    fail("split", "split overrides require all of split.A, split.B, split.C");

  // Signals travel at speed 1; the periodic images must stay causally
  // disconnected from the initial support for the whole run.
  const double reach = duration() + profile.spatial_radius;
  if (!(half_width > reach))
    fail("no-wrap", "half_width " + std::to_string(half_width) +
                        " must exceed steps*dt + spatial_radius = " +
                        std::to_string(reach));

  for (const ApexSpec& a : apexes) {
    if (!(a.t > 0.0) || a.t > duration() + 1e-12)
      fail("apex", "apex time " + std::to_string(a.t) +
                       " must lie in (0, steps*dt]");
    if (std::abs(a.x.x) > half_width || std::abs(a.x.y) > half_width)
      fail("apex", "apex position outside the domain");
  }
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ParsePos {
  const std::string& name;
  int line;
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(name + ":" + std::to_string(line) + ": " + msg);
  }
};

double to_double(const std::string& v, const ParsePos& at) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    at.fail("expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& v, const ParsePos& at) {
  try {
    std::size_t used = 0;
    long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    at.fail("expected an integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& v, const ParsePos& at) {
  try {
    std::size_t used = 0;
    unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    at.fail("expected a nonnegative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, const ParsePos& at) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  at.fail("expected a boolean, got '" + v + "'");
}

ApexSpec to_apex(const std::string& v, const ParsePos& at) {
  ApexSpec a;
  double x1 = 0, x2 = 0;
  char extra;
  if (std::sscanf(v.c_str(), "%lf,%lf,%lf%c", &a.t, &x1, &x2, &extra) != 3)
    at.fail("expected 't,x1,x2', got '" + v + "'");
  a.x = Vec2{x1, x2};
  return a;
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& name) {
  RunConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    ParsePos at{name, line};
    std::string s = raw;
    std::size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) at.fail("expected key=value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) at.fail("empty key");
    if (val.empty()) at.fail("empty value for key '" + key + "'");

    if (key == "grid.nx") cfg.nx = (int)to_long(val, at);
    else if (key == "grid.ny") cfg.ny = (int)to_long(val, at);
    else if (key == "grid.half_width") cfg.half_width = to_double(val, at);
    else if (key == "time.dt_safety") cfg.dt_safety = to_double(val, at);
    else if (key == "time.steps") cfg.steps = to_long(val, at);
    else if (key == "markers.count") cfg.markers = (std::size_t)to_u64(val, at);
    else if (key == "profile.kind") cfg.profile.kind = val;
    else if (key == "profile.spatial_radius") cfg.profile.spatial_radius = to_double(val, at);
    else if (key == "profile.a1") cfg.profile.a1 = to_double(val, at);
    else if (key == "profile.a2") cfg.profile.a2 = to_double(val, at);
    else if (key == "profile.amplitude") cfg.profile.amplitude = to_double(val, at);
    else if (key == "seed") cfg.seed = to_u64(val, at);
    else if (key == "dump.every") cfg.dump_every = to_long(val, at);
    else if (key == "diag.every") cfg.diag_every = to_long(val, at);
    else if (key == "decompose.apex") cfg.apexes.push_back(to_apex(val, at));
    else if (key == "quad.rel") cfg.quad_rel = to_double(val, at);
    else if (key == "split.A") cfg.split_A = to_double(val, at);
    else if (key == "split.B") cfg.split_B = to_double(val, at);
    else if (key == "split.C") cfg.split_C = to_double(val, at);
    else if (key == "support.w") cfg.w = to_double(val, at);
    else if (key == "support.ratio_slack") cfg.ratio_slack = to_double(val, at);
    else if (key == "history.stride") cfg.history_stride = (int)to_long(val, at);
    else if (key == "history.marker_stride") cfg.history_marker_stride = (std::size_t)to_u64(val, at);
    else if (key == "plots.emit") cfg.emit_plots = to_bool(val, at);
    else at.fail("unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in, path);
}

std::string RunConfig::echo() const {
  std::ostringstream o;
  o << "grid.nx=" << nx << "\n";
  o << "grid.ny=" << ny << "\n";
  o << "grid.half_width=" << fmt_double(half_width) << "\n";
  o << "time.dt_safety=" << fmt_double(dt_safety) << "\n";
  o << "time.steps=" << steps << "\n";
  o << "markers.count=" << markers << "\n";
  o << "profile.kind=" << profile.kind << "\n";
  o << "profile.spatial_radius=" << fmt_double(profile.spatial_radius) << "\n";
  o << "profile.a1=" << fmt_double(profile.a1) << "\n";
  o << "profile.a2=" << fmt_double(profile.a2) << "\n";
  o << "profile.amplitude=" << fmt_double(profile.amplitude) << "\n";
  o << "seed=" << seed << "\n";
  o << "dump.every=" << dump_every << "\n";
  o << "diag.every=" << diag_every << "\n";
  for (const ApexSpec& a : apexes)
    o << "decompose.apex=" << fmt_double(a.t) << "," << fmt_double(a.x.x)
      << "," << fmt_double(a.x.y) << "\n";
  o << "quad.rel=" << fmt_double(quad_rel) << "\n";
  if (split_A > 0.0) {
    o << "split.A=" << fmt_double(split_A) << "\n";
    o << "split.B=" << fmt_double(split_B) << "\n";
    o << "split.C=" << fmt_double(split_C) << "\n";
  }
  o << "support.w=" << fmt_double(w) << "\n";
  o << "support.ratio_slack=" << fmt_double(ratio_slack) << "\n";
  o << "history.stride=" << history_stride << "\n";
  o << "history.marker_stride=" << history_marker_stride << "\n";
  o << "plots.emit=" << (emit_plots ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace rvm
