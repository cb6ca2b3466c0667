// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tpl/eigensolver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "tpl/error.hpp"
#include "tpl/partition.hpp"

namespace tpl {

namespace {

// Matrix-free operator on the unknowns of a mask. Each unknown stores its
// four neighbors (or -1 for a face on the Dirichlet boundary).
class MaskedLaplacian {
 public:
  explicit MaskedLaplacian(const DomainMask& mask) {
    const int nx = mask.nx, ny = mask.ny;
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    std::vector<long> local(n, -1);
    for (std::size_t c = 0; c < n; ++c) {
      if (mask.inside[c]) {
        local[c] = static_cast<long>(cells_.size());
        cells_.push_back(c);
      }
    }
    wx_ = 1.0 / std::pow(mask.geometry.a() / nx, 2);
    wy_ = 1.0 / std::pow(mask.geometry.b() / ny, 2);
    nbr_.resize(cells_.size());
    diag_.resize(cells_.size());
    for (std::size_t u = 0; u < cells_.size(); ++u) {
      const int i = static_cast<int>(cells_[u] % nx), j = static_cast<int>(cells_[u] / nx);
      const std::array<std::size_t, 4> nb{
          static_cast<std::size_t>(j) * nx + (i + 1) % nx,
          static_cast<std::size_t>(j) * nx + (i + nx - 1) % nx,
          static_cast<std::size_t>((j + 1) % ny) * nx + i,
          static_cast<std::size_t>((j + ny - 1) % ny) * nx + i};
      double d = 0.0;
      bool thin_x = true, thin_y = true;
      for (int s = 0; s < 4; ++s) {
        const double w = s < 2 ? wx_ : wy_;
        nbr_[u][s] = local[nb[s]];
        // Interior face: w (u_i - u_j); boundary face: w (u_i - (-u_i)).
        d += nbr_[u][s] >= 0 ? w : 2.0 * w;
        if (nbr_[u][s] >= 0) (s < 2 ? thin_x : thin_y) = false;
      }
      diag_[u] = d;
      if (thin_x || thin_y) thin_ = true;
    }
  }

  std::size_t size() const { return cells_.size(); }
  const std::vector<std::size_t>& cells() const { return cells_; }
  bool thin() const { return thin_; }

  void apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t u = 0; u < cells_.size(); ++u) {
      double acc = diag_[u] * x[u];
      const auto& nb = nbr_[u];
      if (nb[0] >= 0) acc -= wx_ * x[static_cast<std::size_t>(nb[0])];
      if (nb[1] >= 0) acc -= wx_ * x[static_cast<std::size_t>(nb[1])];
      if (nb[2] >= 0) acc -= wy_ * x[static_cast<std::size_t>(nb[2])];
      if (nb[3] >= 0) acc -= wy_ * x[static_cast<std::size_t>(nb[3])];
      y[u] = acc;
    }
  }

 private:
  std::vector<std::size_t> cells_;
  std::vector<std::array<long, 4>> nbr_;
  std::vector<double> diag_;
  double wx_ = 0.0, wy_ = 0.0;
  bool thin_ = false;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Conjugate gradients for A x = b from the given x. Returns iterations used.
int conjugate_gradient(const MaskedLaplacian& op, std::span<const double> b, std::span<double> x,
                       double rel_tol, int max_iter) {
  const std::size_t n = op.size();
  std::vector<double> r(n), p(n), ap(n);
  op.apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  const double target = rel_tol * std::sqrt(dot(b, b));
  double rr = dot(r, r);
  if (std::sqrt(rr) <= target) return 0;
  p = r;
  int it = 0;
  for (; it < max_iter; ++it) {
    op.apply(p, ap);
    const double alpha = rr / dot(p, ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= target) {
      ++it;
      break;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return it;
}

GroundState solve(const DomainMask& mask, std::span<const double> start, const SolverOptions& opts) {
  if (!(opts.tol > 0.0 && opts.tol <= 1e-2)) fail(ErrorCode::InvalidArgument, "tol must lie in (0, 1e-2]");
  mask.validate();
  const MaskedLaplacian op(mask);
  const std::size_t n = op.size();
  const int inner_cap =
      std::max(50, static_cast<int>(opts.inner_cap_factor * std::ceil(std::sqrt(static_cast<double>(n)))));

  std::vector<double> x(n, 1.0);
  if (start.size() == n) {
    std::copy(start.begin(), start.end(), x.begin());
    for (auto& v : x) v = std::max(std::abs(v), 1e-3);
  }
  double norm = std::sqrt(dot(x, x));
  for (auto& v : x) v /= norm;

  std::vector<double> ax(n), y(n);
  op.apply(x, ax);
  double lambda = dot(x, ax);

  GroundState gs;
  gs.cells = op.cells();
  gs.thin = op.thin();
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    // Warm start: y ~ x / lambda once x is close to the eigenvector.
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] / lambda;
    gs.inner_iterations += conjugate_gradient(op, x, y, opts.inner_tol, inner_cap);
    norm = std::sqrt(dot(y, y));
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    op.apply(x, ax);
    lambda = dot(x, ax);
    double res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) res2 += (ax[i] - lambda * x[i]) * (ax[i] - lambda * x[i]);
    gs.residual = std::sqrt(res2);
    gs.iterations = outer;
    if (gs.residual <= opts.tol * lambda) {
      gs.energy = lambda;
      const double cell_area = (mask.geometry.a() / mask.nx) * (mask.geometry.b() / mask.ny);
      const double scale = 1.0 / std::sqrt(cell_area);
      const double sign = std::accumulate(x.begin(), x.end(), 0.0) >= 0.0 ? 1.0 : -1.0;
      gs.vector.resize(n);
      for (std::size_t i = 0; i < n; ++i) gs.vector[i] = sign * scale * x[i];
      return gs;
    }
  }
  fail(ErrorCode::SolverDiverged, "inverse iteration did not reach the residual tolerance");
}

}  // namespace

std::size_t DomainMask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

void DomainMask::validate() const {
  if (nx < 1 || ny < 1 || inside.size() != static_cast<std::size_t>(nx) * ny)
    fail(ErrorCode::InvalidArgument, "mask size does not match grid");
  const std::size_t n = count();
  if (n == 0) fail(ErrorCode::InvalidArgument, "empty mask");
  if (n == inside.size()) fail(ErrorCode::InvalidArgument, "mask covers the whole torus (no Dirichlet boundary)");
  std::vector<int> labels(inside.begin(), inside.end());
  if (label_components(nx, ny, labels, 1).size() != 1)
    fail(ErrorCode::InvalidArgument, "mask is not 4-connected");
}

DomainMask rectangle_mask(const TorusGeometry& geom, int nx, int ny, int i0, int j0, int w, int h) {
  if (w < 1 || h < 1 || w > nx || h > ny) fail(ErrorCode::InvalidArgument, "rectangle does not fit the grid");
  DomainMask m{geom, nx, ny, std::vector<std::uint8_t>(static_cast<std::size_t>(nx) * ny, 0)};
  for (int dj = 0; dj < h; ++dj) {
    for (int di = 0; di < w; ++di) {
      const int i = ((i0 + di) % nx + nx) % nx;
      const int j = ((j0 + dj) % ny + ny) % ny;
      m.inside[static_cast<std::size_t>(j) * nx + i] = 1;
    }
  }
  return m;
}

DomainMask label_mask(const TorusGeometry& geom, int nx, int ny, std::span<const int> labels, int label) {
  DomainMask m{geom, nx, ny, std::vector<std::uint8_t>(labels.size(), 0)};
  for (std::size_t c = 0; c < labels.size(); ++c) m.inside[c] = labels[c] == label;
  return m;
}

DomainMask shifted(const DomainMask& mask, int di, int dj) {
  DomainMask m{mask.geometry, mask.nx, mask.ny, std::vector<std::uint8_t>(mask.inside.size(), 0)};
  for (int j = 0; j < mask.ny; ++j) {
    for (int i = 0; i < mask.nx; ++i) {
      const int ii = ((i + di) % mask.nx + mask.nx) % mask.nx;
      const int jj = ((j + dj) % mask.ny + mask.ny) % mask.ny;
      m.inside[static_cast<std::size_t>(jj) * mask.nx + ii] =
          mask.inside[static_cast<std::size_t>(j) * mask.nx + i];
    }
  }
  return m;
}

GroundState ground_energy(const DomainMask& mask, const SolverOptions& opts) {
  return solve(mask, {}, opts);
}

GroundState ground_energy(const DomainMask& mask, std::span<const double> start, const SolverOptions& opts) {
  return solve(mask, start, opts);
}

double convergence_order(std::span<const ConvergenceSample> samples, double reference) {
  std::set<double> hs;
  for (const auto& s : samples) hs.insert(s.h);
  if (hs.size() < 3) fail(ErrorCode::InvalidArgument, "convergence fit needs at least three resolutions");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : samples) {
    const double err = std::abs(s.energy - reference);
    if (!(err > 0.0) || !(s.h > 0.0)) fail(ErrorCode::InvalidArgument, "non-positive error or spacing");
    const double lx = std::log(s.h), ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(samples.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace tpl
