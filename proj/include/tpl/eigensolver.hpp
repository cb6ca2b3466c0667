// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tpl/geometry.hpp"

namespace tpl {

/// Set of cells of a periodic nx-by-ny grid on T(a,b). Row-major, j * nx + i.
struct DomainMask {
  TorusGeometry geometry{1.0, 1.0};
  int nx = 0;
  int ny = 0;
  std::vector<std::uint8_t> inside;

  std::size_t count() const;
  /// Throws InvalidArgument unless the mask is nonempty, not the whole torus,
  /// and 4-connected on the periodic grid.
  void validate() const;
};

/// Axis-aligned block of w-by-h cells with lower-left cell (i0,j0); wraps
/// periodically when it leaves the grid.
DomainMask rectangle_mask(const TorusGeometry& geom, int nx, int ny, int i0, int j0, int w, int h);

/// Cells carrying `label` in a row-major label array.
DomainMask label_mask(const TorusGeometry& geom, int nx, int ny, std::span<const int> labels, int label);

/// Cyclic shift by (di,dj) cells.
DomainMask shifted(const DomainMask& mask, int di, int dj);

struct GroundState {
  double energy = 0.0;
  std::vector<std::size_t> cells;  // grid index of each unknown
  std::vector<double> vector;      // positive, sum psi^2 hx hy = 1
  int iterations = 0;
  int inner_iterations = 0;
  double residual = 0.0;  // ||A psi - lambda psi|| / ||psi||
  bool thin = false;      // some row or column of the mask is one cell wide
};

struct SolverOptions {
  double tol = 1e-8;  // on ||A psi - lambda psi|| <= tol * lambda
  int max_outer = 500;
  int inner_cap_factor = 10;  // CG iterations <= factor * sqrt(unknowns)
  double inner_tol = 1e-11;
};

/// Smallest eigenvalue of the 5-point Dirichlet Laplacian on the mask. The
/// Dirichlet condition sits on the cell faces separating the mask from its
/// complement (antisymmetric ghost values), so a mask of w cells across has
/// width exactly w h and the error against the continuum is O(h^2). Periodic
/// wrap is by index arithmetic. Throws SolverDiverged when max_outer is hit.
GroundState ground_energy(const DomainMask& mask, const SolverOptions& opts = {});

/// Same, warm-started from a previous vector over the same cell list.
GroundState ground_energy(const DomainMask& mask, std::span<const double> start,
                          const SolverOptions& opts);

/// Least-squares slope of log|E(h) - reference| against log h over at least
/// three distinct resolutions.
struct ConvergenceSample {
  double h = 0.0;
  double energy = 0.0;
};
double convergence_order(std::span<const ConvergenceSample> samples, double reference);

}  // namespace tpl
