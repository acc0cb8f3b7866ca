#pragma once

#include <cstddef>
#include <vector>

#include "rvm2d/vec.hpp"

namespace rvm {

// Periodic scalar grid, row-major with x1 fastest.
struct Grid2D {
  int nx = 0, ny = 0;
  std::vector<double> a;

  Grid2D() = default;
  Grid2D(int nx_, int ny_) : nx(nx_), ny(ny_), a(static_cast<std::size_t>(nx_) * ny_, 0.0) {}

  double& at(int i, int j) { return a[idx(i, j)]; }
  double at(int i, int j) const { return a[idx(i, j)]; }
  std::size_t idx(int i, int j) const {
    i %= nx; if (i < 0) i += nx;
    j %= ny; if (j < 0) j += ny;
    return static_cast<std::size_t>(j) * nx + i;
  }
  void fill(double v) { for (double& x : a) x = v; }
};

// TE-mode Yee layout on [-L, L)^2, mesh dx = 2L/nx, dy = 2L/ny:
//   E1 on x-edges      (i+1/2, j)
//   E2 on y-edges      (i, j+1/2)
//   B  at cell centers (i+1/2, j+1/2)
//   rho, phi at nodes  (i, j)
// Update (units c = 1):
//   dE/dt = curl_perp B - j     with curl_perp B = (d_{x2} B, -d_{x1} B)
//   dB/dt = d_{x2} E1 - d_{x1} E2
// B is kept synchronized with E by half-stepping around the E update, which
// is algebraically the interleaved leapfrog.  Stable for dt <= dx/sqrt(2).
class FieldState {
 public:
  FieldState(int nx, int ny, double half_width, double dt);

  // One full step given the current deposited at the half step (E1/E2 layout).
  void step(const Grid2D& j1, const Grid2D& j2);
  void step_free() { step(zero_, zero_); }

  // max_ij |div E - rho| / max(max|rho|, floor).  rho at nodes, already
  // including any neutralizing background.
  double gauss_residual(const Grid2D& rho, double floor = 1e-30) const;

  // (1/2) sum (E1^2 + E2^2 + B^2) dA, chunk-deterministic.
  double energy() const;

  // Solve div E = rho - mean(rho) for a curl-free E (periodic Poisson via
  // conjugate gradients on the 5-point Laplacian; deterministic).
  void init_from_charge(const Grid2D& rho, double rel_tol = 1e-14);

  // Bilinear samples at a physical point, each component on its own grid.
  double sample_E1(const Vec2& x) const;
  double sample_E2(const Vec2& x) const;
  double sample_B(const Vec2& x) const;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double dt() const { return dt_; }
  double half_width() const { return L_; }
  double time() const { return t_; }
  void set_time(double t) { t_ = t; }

  Grid2D e1, e2, b;

 private:
  int nx_, ny_;
  double L_, dx_, dy_, dt_, t_ = 0.0;
  Grid2D zero_;

  void half_step_b();
};

// CFL bound for the square Yee mesh.
inline double cfl_limit(double dx, double dy) {
  return 1.0 / std::sqrt(1.0 / (dx * dx) + 1.0 / (dy * dy));
}

}  // namespace rvm
