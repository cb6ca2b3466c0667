// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tpl/geometry.hpp"
#include "tpl/spectrum.hpp"

namespace tpl {

/// Eigenfunction families of a single mode pair (m,n), with X = 2 pi x / a and
/// Y = 2 pi y / b:
///
///   general      mu (cos mX cos(nY + theta1) + lam sin mX cos(nY + theta2))
///   lemma        mu (cos mX cos(nY + theta1) + lam sin mX sin(nY + theta2))
///   product_cos  mu  cos mX cos(nY + theta1)
///   product_sin  mu  sin nY (lam sin mX + branch cos mX)
///
/// `lemma` is `general` with theta2 shifted by -pi/2; see to_general().
enum class EigenForm { general, lemma, product_cos, product_sin };

struct EigenfunctionSpec {
  EigenIndex mode;
  double mu = 1.0;
  double lam = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  EigenForm form = EigenForm::general;
  int branch = 1;  // sign of the cos mX term in product_sin
  double shift_x = 0.0;  // evaluates u(x - shift_x, y - shift_y)
  double shift_y = 0.0;

  /// Throws InvalidArgument for mu == 0, branch not +-1, or a combination that
  /// vanishes identically (product_sin with n == 0 or lam == 0, product_cos
  /// with n == 0 and cos theta1 == 0). Angles are reduced mod 2 pi.
  static EigenfunctionSpec make(EigenIndex mode, EigenForm form, double lam = 0.0,
                                double theta1 = 0.0, double theta2 = 0.0, double mu = 1.0,
                                int branch = 1);

  /// Equivalent spec on the cosine-cosine family (identity for non-lemma forms).
  EigenfunctionSpec to_general() const;
  /// Same function translated by (x0, y0).
  EigenfunctionSpec translated(double x0, double y0) const;
};

/// Value, gradient and Hessian of an eigenfunction at a point.
struct Jet {
  double u = 0, ux = 0, uy = 0, uxx = 0, uxy = 0, uyy = 0;
};

double eval(const EigenfunctionSpec& spec, const TorusGeometry& geom, double x, double y);
Jet eval_jet(const EigenfunctionSpec& spec, const TorusGeometry& geom, double x, double y);

/// Upper bound on sup |u| (sum of absolute term amplitudes).
double sup_bound(const EigenfunctionSpec& spec);

/// Cell-centered sign samples; row-major with index j * nx + i.
struct SignGrid {
  int nx = 0;
  int ny = 0;
  std::vector<std::int8_t> signs;
  TorusGeometry geometry{1.0, 1.0};

  std::int8_t at(int i, int j) const { return signs[static_cast<std::size_t>(j) * nx + i]; }
};

SignGrid sign_grid(const EigenfunctionSpec& spec, const TorusGeometry& geom, int nx, int ny);

/// Connected sign components of a sign grid under periodic 4-adjacency.
/// labels[c] is 0 on the zero set and 1..count otherwise.
struct NodalLabels {
  int count = 0;
  std::vector<int> labels;
};
NodalLabels label_nodal_domains(const SignGrid& grid);

/// Number of nodal domains at (nx,ny); re-counted at (2nx,2ny) and throws
/// ResolutionUnstable if the counts differ. Requires nx >= 32 m and ny >= 32 n.
int count_nodal_domains(const EigenfunctionSpec& spec, const TorusGeometry& geom, int nx, int ny);

struct CriticalZero {
  double x = 0.0;
  double y = 0.0;
  double residual = 0.0;  // max(|u|, |u_x|, |u_y|)
};

struct CriticalZeroSearch {
  std::vector<CriticalZero> zeros;
  int seeds = 0;
  int failed_seeds = 0;  // seeds whose refinement did not reach the acceptance residual
};

inline constexpr double kCriticalResidual = 1e-10;

/// Gauss-Newton refinement of (u, u_x, u_y) = 0 started from grid seeds at
/// resolution seed_res along each axis. Requires seed_res >= 32 max(m,n,1).
CriticalZeroSearch find_critical_zeros(const EigenfunctionSpec& spec, const TorusGeometry& geom,
                                       int seed_res);

/// Connected components of the curves y = -x + c (c integer) on the torus
/// R^2 / (pZ x qZ); equal to gcd(p,q). Throws DegenerateInput for (0,0).
std::int64_t knot_components(std::int64_t p, std::int64_t q);
/// Same count obtained by walking the lattice points of each curve.
std::int64_t knot_components_traced(std::int64_t p, std::int64_t q);

/// Binary PGM (P5) of nodal labels, one gray level per domain, 0 on the zero set.
void write_labels_pgm(std::ostream& os, int nx, int ny, const std::vector<int>& labels);
/// CSV with header cell,i,j,label.
void write_labels_csv(std::ostream& os, int nx, int ny, const std::vector<int>& labels);

}  // namespace tpl
