#include "rvm2d/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "rvm2d/parallel.hpp"

namespace rvm {

FieldState::FieldState(int nx, int ny, double half_width, double dt)
    : e1(nx, ny), e2(nx, ny), b(nx, ny), nx_(nx), ny_(ny), L_(half_width),
      dx_(2.0 * half_width / nx), dy_(2.0 * half_width / ny), dt_(dt), zero_(nx, ny) {
  if (nx < 4 || ny < 4) throw std::invalid_argument("FieldState: grid too small");
  if (!(half_width > 0.0)) throw std::invalid_argument("FieldState: half_width must be > 0");
  if (!(dt > 0.0) || dt > cfl_limit(dx_, dy_) * (1.0 + 1e-12))
    throw std::invalid_argument("FieldState: dt violates the CFL bound dx/sqrt(2)");
}

void FieldState::half_step_b() {
  // dB/dt = d_{x2} E1 - d_{x1} E2; B entries depend only on E, no aliasing
  const double hx = 0.5 * dt_ / dx_, hy = 0.5 * dt_ / dy_;
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i)
      b.at(i, j) += hy * (e1.at(i, j + 1) - e1.at(i, j))
                  - hx * (e2.at(i + 1, j) - e2.at(i, j));
}

void FieldState::step(const Grid2D& j1, const Grid2D& j2) {
  half_step_b();
  const double rx = dt_ / dx_, ry = dt_ / dy_;
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      e1.at(i, j) += ry * (b.at(i, j) - b.at(i, j - 1)) - dt_ * j1.at(i, j);
      e2.at(i, j) += -rx * (b.at(i, j) - b.at(i - 1, j)) - dt_ * j2.at(i, j);
    }
  half_step_b();
  t_ += dt_;
}

double FieldState::gauss_residual(const Grid2D& rho, double floor) const {
  double rmax = floor, worst = 0.0;
  for (double v : rho.a) rmax = std::max(rmax, std::abs(v));
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      double div = (e1.at(i, j) - e1.at(i - 1, j)) / dx_ +
                   (e2.at(i, j) - e2.at(i, j - 1)) / dy_;
      worst = std::max(worst, std::abs(div - rho.at(i, j)));
    }
  return worst / rmax;
}

double FieldState::energy() const {
  const std::size_t n = e1.a.size();
  std::vector<double> parts(chunk_count_for(n), 0.0);
  parallel_chunks(n, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k)
      s += e1.a[k] * e1.a[k] + e2.a[k] * e2.a[k] + b.a[k] * b.a[k];
    parts[c] = s;
  });
  return 0.5 * dx_ * dy_ * tree_sum(std::move(parts));
}

void FieldState::init_from_charge(const Grid2D& rho, double rel_tol) {
  // -lap phi = rho - mean(rho);  E = -grad phi on the staggered edges, so the
  // discrete divergence of E reproduces rho - mean exactly.
  const std::size_t n = rho.a.size();
  double mean = 0.0;
  for (double v : rho.a) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> bvec(n), x(n, 0.0), r(n), p(n), Ap(n);
  double bnorm = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    bvec[k] = rho.a[k] - mean;
    bnorm += bvec[k] * bvec[k];
  }
  if (bnorm == 0.0) {
    e1.fill(0.0);
    e2.fill(0.0);
    return;
  }

  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    const double ax = 1.0 / (dx_ * dx_), ay = 1.0 / (dy_ * dy_);
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) {
        std::size_t k = rho.idx(i, j);
        out[k] = ax * (2.0 * v[k] - v[rho.idx(i - 1, j)] - v[rho.idx(i + 1, j)]) +
                 ay * (2.0 * v[k] - v[rho.idx(i, j - 1)] - v[rho.idx(i, j + 1)]);
      }
  };

  r = bvec;
  p = r;
  double rs = bnorm;
  const double stop = rel_tol * rel_tol * bnorm;
  for (std::size_t it = 0; it < 4 * n && rs > stop; ++it) {
    apply(p, Ap);
    double pAp = 0.0;
    for (std::size_t k = 0; k < n; ++k) pAp += p[k] * Ap[k];
    if (pAp <= 0.0) break;
    double alpha = rs / pAp;
    double rs_new = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
      rs_new += r[k] * r[k];
    }
    double beta = rs_new / rs;
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    rs = rs_new;
  }

  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      e1.at(i, j) = -(x[rho.idx(i + 1, j)] - x[rho.idx(i, j)]) / dx_;
      e2.at(i, j) = -(x[rho.idx(i, j + 1)] - x[rho.idx(i, j)]) / dy_;
    }
  b.fill(0.0);
}

namespace {
// bilinear sample of a grid whose (0,0) entry sits at (-L + ox, -L + oy)
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

double FieldState::sample_E1(const Vec2& x) const {
  return bilinear(e1, L_, dx_, dy_, 0.5 * dx_, 0.0, x);
}
double FieldState::sample_E2(const Vec2& x) const {
  return bilinear(e2, L_, dx_, dy_, 0.0, 0.5 * dy_, x);
}
double FieldState::sample_B(const Vec2& x) const {
  return bilinear(b, L_, dx_, dy_, 0.5 * dx_, 0.5 * dy_, x);
}

}  // namespace rvm
