#include "rvm2d/deposit.hpp"

#include <cmath>
#include <stdexcept>

#include "rvm2d/parallel.hpp"

namespace rvm {

namespace {

// 1D CIC shape factors on the 4-node stencil {base, base+1, base+2, base+3}
// around the normalized coordinate u (units of cells).
inline void shape4(double u, int base, double s[4]) {
  for (int k = 0; k < 4; ++k) {
    double d = std::abs(u - (base + k));
    s[k] = d < 1.0 ? 1.0 - d : 0.0;
  }
}

struct ScratchGrids {
  std::vector<Grid2D> g;
  ScratchGrids(std::size_t chunks, int nx, int ny) {
    g.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) g.emplace_back(nx, ny);
  }
  // merge in chunk order: deterministic
  void reduce_into(Grid2D& out) {
    for (auto& s : g)
      for (std::size_t k = 0; k < out.a.size(); ++k) out.a[k] += s.a[k];
  }
};

}  // namespace

void deposit_charge(const MarkerEnsemble& m, double half_width, Grid2D& rho) {
  const int nx = rho.nx, ny = rho.ny;
  const double dx = 2.0 * half_width / nx, dy = 2.0 * half_width / ny;
  const double inv_cell = 1.0 / (dx * dy);
  rho.fill(0.0);

  const std::size_t chunks = chunk_count_for(m.size());
  ScratchGrids scratch(chunks, nx, ny);
  parallel_chunks(m.size(), [&](std::size_t c, std::size_t lo, std::size_t hi) {
    Grid2D& g = scratch.g[c];
    for (std::size_t k = lo; k < hi; ++k) {
      double u = (m.x1[k] + half_width) / dx;
      double v = (m.x2[k] + half_width) / dy;
      int i0 = static_cast<int>(std::floor(u));
      int j0 = static_cast<int>(std::floor(v));
      double q = m.normalization * m.w[k] * inv_cell;
      double fu = u - i0, fv = v - j0;
      g.at(i0, j0) += q * (1 - fu) * (1 - fv);
      g.at(i0 + 1, j0) += q * fu * (1 - fv);
      g.at(i0, j0 + 1) += q * (1 - fu) * fv;
      g.at(i0 + 1, j0 + 1) += q * fu * fv;
    }
  });
  scratch.reduce_into(rho);
}

void deposit_current(const MarkerEnsemble& m, const std::vector<double>& x1_before,
                     const std::vector<double>& x2_before, double half_width, double dt,
                     Grid2D& j1, Grid2D& j2) {
  if (x1_before.size() != m.size() || x2_before.size() != m.size())
    throw std::invalid_argument("deposit_current: position history size mismatch");
  const int nx = j1.nx, ny = j1.ny;
  const double dx = 2.0 * half_width / nx, dy = 2.0 * half_width / ny;
  const double inv_cell = 1.0 / (dx * dy);
  const double wrap_x = 2.0 * half_width, wrap_y = 2.0 * half_width;
  j1.fill(0.0);
  j2.fill(0.0);

  const std::size_t chunks = chunk_count_for(m.size());
  ScratchGrids s1(chunks, nx, ny), s2(chunks, nx, ny);

  parallel_chunks(m.size(), [&](std::size_t c, std::size_t lo, std::size_t hi) {
    Grid2D& g1 = s1.g[c];
    Grid2D& g2 = s2.g[c];
    for (std::size_t k = lo; k < hi; ++k) {
      // unwrap the end position so the displacement is the physical one
      double xa = x1_before[k], ya = x2_before[k];
      double xb = m.x1[k], yb = m.x2[k];
      if (xb - xa > half_width) xb -= wrap_x;
      if (xb - xa < -half_width) xb += wrap_x;
      if (yb - ya > half_width) yb -= wrap_y;
      if (yb - ya < -half_width) yb += wrap_y;

      double u0 = (xa + half_width) / dx, v0 = (ya + half_width) / dy;
      double u1 = (xb + half_width) / dx, v1 = (yb + half_width) / dy;
      int ib = static_cast<int>(std::floor(u0)) - 1;
      int jb = static_cast<int>(std::floor(v0)) - 1;

      double sx0[4], sx1[4], sy0[4], sy1[4];
      shape4(u0, ib, sx0);
      shape4(u1, ib, sx1);
      shape4(v0, jb, sy0);
      shape4(v1, jb, sy1);

      double dsx[4], dsy[4], mx[4], my[4];
      for (int a = 0; a < 4; ++a) {
        dsx[a] = sx1[a] - sx0[a];
        dsy[a] = sy1[a] - sy0[a];
        mx[a] = sx0[a] + 0.5 * dsx[a];
        my[a] = sy0[a] + 0.5 * dsy[a];
      }

      const double q = m.normalization * m.w[k] * inv_cell;
      // j1(i+1/2, j): prefix sum of -q dx/dt * dsx * my along x
      for (int b = 0; b < 4; ++b) {
        double acc = 0.0;
        for (int a = 0; a < 4; ++a) {
          acc += dsx[a] * my[b];
          g1.at(ib + a, jb + b) += -q * (dx / dt) * acc;
        }
      }
      // j2(i, j+1/2): prefix sum of -q dy/dt * dsy * mx along y
      for (int a = 0; a < 4; ++a) {
        double acc = 0.0;
        for (int b = 0; b < 4; ++b) {
          acc += dsy[b] * mx[a];
          g2.at(ib + a, jb + b) += -q * (dy / dt) * acc;
        }
      }
    }
  });
  s1.reduce_into(j1);
  s2.reduce_into(j2);
}

double continuity_residual(const Grid2D& rho_old, const Grid2D& rho_new, const Grid2D& j1,
                           const Grid2D& j2, double dx, double dy, double dt) {
  double worst = 0.0;
  for (int j = 0; j < rho_old.ny; ++j)
    for (int i = 0; i < rho_old.nx; ++i) {
      double drho = (rho_new.at(i, j) - rho_old.at(i, j)) / dt;
      double div = (j1.at(i, j) - j1.at(i - 1, j)) / dx +
                   (j2.at(i, j) - j2.at(i, j - 1)) / dy;
      worst = std::max(worst, std::abs(drho + div));
    }
  return worst;
}

}  // namespace rvm
