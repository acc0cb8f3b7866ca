#include "rvm2d/source.hpp"

#include <algorithm>
#include <stdexcept>

namespace rvm {

namespace {

// radial extent of the rectangle [-P,P] x [-P2,P2] along direction theta
inline double rect_radius(double P, double P2, double theta) {
  double c = std::abs(std::cos(theta)), s = std::abs(std::sin(theta));
  double r1 = c > 1e-300 ? P / c : std::numeric_limits<double>::infinity();
  double r2 = s > 1e-300 ? P2 / s : std::numeric_limits<double>::infinity();
  return std::min(r1, r2);
}

}  // namespace

QuadResult AnalyticSource::momentum_moment(double s, const Vec2& y,
                                           const std::function<double(const Vec2&)>& g,
                                           const MomentOptions& opt) const {
  const double P = model_.P, P2 = model_.P2;
  if (!(opt.theta_hi > opt.theta_lo))
    return {};

  // theta breakpoints: axes, rectangle corners, singular direction
  const double corner = std::atan2(P2, P);
  std::vector<double> marks = {0.0, M_PI_2, M_PI, -M_PI_2, -M_PI,
                               corner, M_PI - corner, -corner, corner - M_PI};
  if (std::isfinite(opt.singular_theta)) {
    double a = wrap_angle(opt.singular_theta);
    marks.push_back(a);
    // the (1 + phat.xi)^{-k} peak has width ~ sqrt(1 - |phat||xi|); seed a
    // few nearby breakpoints so refinement locks on quickly
    for (double d : {1e-3, 1e-2, 1e-1}) {
      marks.push_back(a + d);
      marks.push_back(a - d);
    }
  }

  std::vector<double> pts = {opt.theta_lo, opt.theta_hi};
  const double span = opt.theta_hi - opt.theta_lo;
  for (double mtheta : marks) {
    // bring each mark into [theta_lo, theta_lo + 2pi) and keep if inside
    double d = mtheta - opt.theta_lo;
    d -= 2.0 * M_PI * std::floor(d / (2.0 * M_PI));
    if (d > 1e-12 && d < span - 1e-12) pts.push_back(opt.theta_lo + d);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-13; }),
            pts.end());

  QuadOptions radial;
  radial.rel = std::max(opt.rel * 0.05, 1e-12);
  // wide rectangles need 1-2k radial evals along near-singular directions;
  // a starved radial pass would return a fine value with a lying flag, so
  // keep a floor and leave global cost control to the caller's budget
  radial.max_evals = std::max(opt.max_evals / 8, 2048L);

  long evals = 0;
  bool inner_ok = true;
  auto ftheta = [&](double theta) {
    const double c = std::cos(theta), sn = std::sin(theta);
    const double umax = rect_radius(P, P2, theta);
    auto h = [&](double u) {
      Vec2 p{u * c, u * sn};
      return u * model_.f(s, y, p) * g(p);
    };
    // wide rectangles span decades in |p|; integrating the tail in log radius
    // keeps the panel count proportional to the number of decades
    QuadResult r;
    if (umax <= 2.0) {
      r = integrate(h, 0.0, umax, radial);
    } else {
      r = integrate(h, 0.0, 1.0, radial);
      r += integrate(
          [&](double v) {
            const double u = std::exp(v);
            return u * h(u);
          },
          0.0, std::log(umax), radial);
    }
    evals += r.evals;
    inner_ok = inner_ok && r.converged;
    return r.value;
  };

  QuadOptions outer;
  outer.rel = opt.rel;
  // outer counts theta nodes; the singular-direction wedge alone can need a
  // few hundred, so keep a floor here too (total cost still lands on the
  // caller's eval budget, which is the real throttle)
  outer.max_evals = std::max(opt.max_evals / 16, 4096L);
  QuadResult res = integrate_split(ftheta, pts, outer);
  res.evals = evals;
  res.converged = res.converged && inner_ok;
  return res;
}

void ParticleHistory::record(const MarkerEnsemble& m) {
  if (!times_.empty() && m.time() <= times_.back() + 1e-15) return;
  if (w_.empty()) {
    norm_ = m.normalization;
    for (std::size_t i = 0; i < m.size(); i += stride_)
      w_.push_back(m.w[i] * static_cast<double>(stride_));
  }
  std::vector<double> x1, x2, p1, p2;
  const std::size_t n = w_.size();
  x1.reserve(n); x2.reserve(n); p1.reserve(n); p2.reserve(n);
  for (std::size_t i = 0; i < m.size(); i += stride_) {
    x1.push_back(m.x1[i]);
    x2.push_back(m.x2[i]);
    p1.push_back(m.p1[i]);
    p2.push_back(m.p2[i]);
  }
  times_.push_back(m.time());
  x1_.push_back(std::move(x1));
  x2_.push_back(std::move(x2));
  p1_.push_back(std::move(p1));
  p2_.push_back(std::move(p2));
}

double ParticleHistory::t_begin() const {
  if (times_.empty()) throw std::runtime_error("ParticleHistory: empty");
  return times_.front();
}
double ParticleHistory::t_end() const {
  if (times_.empty()) throw std::runtime_error("ParticleHistory: empty");
  return times_.back();
}

void ParticleHistory::state_at(double s, std::size_t i, Vec2& x, Vec2& p) const {
  if (times_.empty()) throw std::runtime_error("ParticleHistory: empty");
  if (s <= times_.front()) {
    x = {x1_.front()[i], x2_.front()[i]};
    p = {p1_.front()[i], p2_.front()[i]};
    return;
  }
  if (s >= times_.back()) {
    x = {x1_.back()[i], x2_.back()[i]};
    p = {p1_.back()[i], p2_.back()[i]};
    return;
  }
  std::size_t hi = static_cast<std::size_t>(
      std::lower_bound(times_.begin() + 1, times_.end(), s) - times_.begin());
  std::size_t lo = hi - 1;
  double a = (s - times_[lo]) / (times_[hi] - times_[lo]);
  x = {(1 - a) * x1_[lo][i] + a * x1_[hi][i], (1 - a) * x2_[lo][i] + a * x2_[hi][i]};
  p = {(1 - a) * p1_[lo][i] + a * p1_[hi][i], (1 - a) * p2_[lo][i] + a * p2_[hi][i]};
}

MarkerSource::MarkerSource(std::shared_ptr<const ParticleHistory> hist, double smoothing)
    : hist_(std::move(hist)), h_(smoothing) {
  if (!(h_ > 0.0)) throw std::invalid_argument("MarkerSource: smoothing width must be > 0");
}

QuadResult MarkerSource::momentum_moment(double s, const Vec2& y,
                                         const std::function<double(const Vec2&)>& g,
                                         const MomentOptions& opt) const {
  QuadResult out;
  const double lo = opt.theta_lo, hi = opt.theta_hi;
  const bool full = hi - lo >= 2.0 * M_PI - 1e-12;
  double acc = 0.0;
  const std::size_t n = hist_->marker_count();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 x, p;
    hist_->state_at(s, i, x, p);
    double d1 = std::abs(y.x - x.x), d2 = std::abs(y.y - x.y);
    if (d1 >= h_ || d2 >= h_) continue;
    if (!full) {
      // wedge test on the momentum angle, wrapped into [lo, lo + 2pi)
      double th = angle_from_e1(p) - lo;
      th -= 2.0 * M_PI * std::floor(th / (2.0 * M_PI));
      if (th > hi - lo) continue;
    }
    double shape = (1.0 - d1 / h_) * (1.0 - d2 / h_) / (h_ * h_);
    acc += hist_->weight(i) * shape * g(p);
    ++out.evals;
  }
  // bare weights sample f directly; the 4pi factor belongs to rho and j only
  out.value = acc;
  out.error = 0.0;  // exact sum over the empirical measure
  return out;
}

double MarkerSource::extent_p1() const {
  double m = 0.0;
  for (std::size_t i = 0; i < hist_->marker_count(); ++i) {
    Vec2 x, p;
    hist_->state_at(hist_->t_end(), i, x, p);
    m = std::max(m, std::abs(p.x));
  }
  return m;
}

double MarkerSource::extent_p2() const {
  double m = 0.0;
  for (std::size_t i = 0; i < hist_->marker_count(); ++i) {
    Vec2 x, p;
    hist_->state_at(hist_->t_end(), i, x, p);
    m = std::max(m, std::abs(p.y));
  }
  return m;
}

double MarkerSource::sup_density() const { return std::numeric_limits<double>::infinity(); }

}  // namespace rvm
