#include "rvm2d/history.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rvm {

FieldHistory::FieldHistory(int nx, int ny, double half_width, int stride)
    : nx_(nx), ny_(ny), stride_(stride < 1 ? 1 : stride), L_(half_width),
      dx_(2.0 * half_width / nx), dy_(2.0 * half_width / ny) {}

void FieldHistory::record(const FieldState& state) {
  if (state.nx() != nx_ || state.ny() != ny_)
    throw std::invalid_argument("FieldHistory: grid shape mismatch");
  if (step_counter_++ % stride_ != 0) return;
  if (!times_.empty() && state.time() <= times_.back() + 1e-15) {
    if (state.time() <= times_.back() - 1e-12)
      throw std::invalid_argument("FieldHistory: non-increasing snapshot time");
    return;  // duplicate instant
  }
  times_.push_back(state.time());
  e1_.push_back(state.e1);
  e2_.push_back(state.e2);
  b_.push_back(state.b);
}

double FieldHistory::t_begin() const {
  if (times_.empty()) throw std::runtime_error("FieldHistory: empty");
  return times_.front();
}
double FieldHistory::t_end() const {
  if (times_.empty()) throw std::runtime_error("FieldHistory: empty");
  return times_.back();
}

namespace {
double bilinear(const Grid2D& g, double L, double dx, double dy, double ox, double oy,
                const Vec2& x) {
  double u = (x.x + L - ox) / dx;
  double v = (x.y + L - oy) / dy;
  double fu = std::floor(u), fv = std::floor(v);
  int i = static_cast<int>(fu), j = static_cast<int>(fv);
  double a = u - fu, c = v - fv;
  return (1 - a) * (1 - c) * g.at(i, j) + a * (1 - c) * g.at(i + 1, j) +
         (1 - a) * c * g.at(i, j + 1) + a * c * g.at(i + 1, j + 1);
}
}  // namespace

FieldSample FieldHistory::sample_snap(std::size_t k, const Vec2& y) const {
  FieldSample s;
  s.e1 = bilinear(e1_[k], L_, dx_, dy_, 0.5 * dx_, 0.0, y);
  s.e2 = bilinear(e2_[k], L_, dx_, dy_, 0.0, 0.5 * dy_, y);
  s.b = bilinear(b_[k], L_, dx_, dy_, 0.5 * dx_, 0.5 * dy_, y);
  return s;
}

FieldSample FieldHistory::sample(double s, const Vec2& y) const {
  if (times_.empty()) throw std::runtime_error("FieldHistory: empty");
  const double eps = 1e-12 * (1.0 + std::abs(times_.back()));
  if (s < times_.front() - eps || s > times_.back() + eps)
    throw std::invalid_argument("FieldHistory: time outside recorded span");
  if (s <= times_.front()) return sample_snap(0, y);
  if (s >= times_.back()) return sample_snap(times_.size() - 1, y);

  std::size_t hi = static_cast<std::size_t>(
      std::lower_bound(times_.begin() + 1, times_.end(), s) - times_.begin());
  std::size_t lo = hi - 1;
  double span = times_[hi] - times_[lo];
  if (span > 2.5 * stride_ * (times_.back() - times_.front()) / std::max<std::size_t>(times_.size() - 1, 1))
    throw std::runtime_error("FieldHistory: gap in recorded snapshots");
  double a = (s - times_[lo]) / span;
  FieldSample f0 = sample_snap(lo, y), f1 = sample_snap(hi, y);
  return {(1 - a) * f0.e1 + a * f1.e1, (1 - a) * f0.e2 + a * f1.e2,
          (1 - a) * f0.b + a * f1.b};
}

std::vector<FieldSample> FieldHistory::sample_on_cone(double t, const Vec2& x,
                                                      const std::vector<ConeNode>& nodes,
                                                      double cone_tol) const {
  if (cone_tol < 0.0) cone_tol = dx_;
  std::vector<FieldSample> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) {
    double r = (n.y - x).norm();
    if (std::abs(r - (t - n.s)) > cone_tol)
      throw std::invalid_argument("sample_on_cone: node off the backward lightcone");
    out.push_back(sample(n.s, n.y));
  }
  return out;
}

double FieldHistory::force_magnitude(double s, const Vec2& y) const {
  FieldSample f = sample(s, y);
  return std::hypot(f.e1, f.e2) + std::abs(f.b);
}

double Kg(const Vec2& E, double B, const Vec2& omega) {
  if (std::abs(omega.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("Kg: omega must be a unit vector");
  double radial = E.dot(omega);
  double transverse = B + omega.x * E.y - omega.y * E.x;
  return std::hypot(radial, transverse);
}

}  // namespace rvm
