// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tpl/nodal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tpl/error.hpp"

namespace tpl {

namespace {

// c * cos(kx x + px) * cos(ky y + py)
struct Term {
  double c, kx, px, ky, py;
};

double reduce_angle(double t) {
  double r = std::fmod(t, 2.0 * kPi);
  if (r < 0) r += 2.0 * kPi;
  return r;
}

std::vector<Term> terms_of(const EigenfunctionSpec& s, const TorusGeometry& g) {
  const double kx = 2.0 * kPi * static_cast<double>(s.mode.m) / g.a();
  const double ky = 2.0 * kPi * static_cast<double>(s.mode.n) / g.b();
  const double half = kPi / 2.0;
  std::vector<Term> t;
  switch (s.form) {
    case EigenForm::general:
      t.push_back({s.mu, kx, 0.0, ky, s.theta1});
      t.push_back({s.mu * s.lam, kx, -half, ky, s.theta2});
      break;
    case EigenForm::lemma:
      return terms_of(s.to_general(), g);
    case EigenForm::product_cos:
      t.push_back({s.mu, kx, 0.0, ky, s.theta1});
      break;
    case EigenForm::product_sin:
      t.push_back({s.mu * s.lam, kx, -half, ky, -half});
      t.push_back({s.mu * s.branch, kx, 0.0, ky, -half});
      break;
  }
  for (auto& term : t) {
    term.px -= term.kx * s.shift_x;
    term.py -= term.ky * s.shift_y;
  }
  return t;
}

Jet jet_of(const std::vector<Term>& terms, double x, double y) {
  Jet j;
  for (const auto& t : terms) {
    const double ax = t.kx * x + t.px;
    const double ay = t.ky * y + t.py;
    const double cx = std::cos(ax), sx = std::sin(ax);
    const double cy = std::cos(ay), sy = std::sin(ay);
    j.u += t.c * cx * cy;
    j.ux += -t.c * t.kx * sx * cy;
    j.uy += -t.c * t.ky * cx * sy;
    j.uxx += -t.c * t.kx * t.kx * cx * cy;
    j.uxy += t.c * t.kx * t.ky * sx * sy;
    j.uyy += -t.c * t.ky * t.ky * cx * cy;
  }
  return j;
}

double wrap(double v, double period) {
  double r = std::fmod(v, period);
  if (r < 0) r += period;
  return r;
}

// Union-find with path halving; union by smaller root index keeps the
// labeling independent of visit order.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

EigenfunctionSpec EigenfunctionSpec::make(EigenIndex mode, EigenForm form, double lam,
                                          double theta1, double theta2, double mu, int branch) {
  if (mode.m < 0 || mode.n < 0) fail(ErrorCode::InvalidArgument, "mode indices must be non-negative");
  if (mu == 0.0 || !std::isfinite(mu)) fail(ErrorCode::InvalidArgument, "mu must be nonzero");
  if (branch != 1 && branch != -1) fail(ErrorCode::InvalidArgument, "branch must be +1 or -1");
  if (!std::isfinite(lam) || !std::isfinite(theta1) || !std::isfinite(theta2))
    fail(ErrorCode::InvalidArgument, "coefficients must be finite");
  if (form == EigenForm::product_sin) {
    if (lam == 0.0) fail(ErrorCode::InvalidArgument, "product_sin requires lam != 0");
    if (mode.n == 0) fail(ErrorCode::InvalidArgument, "product_sin vanishes for n == 0");
  }
  EigenfunctionSpec s;
  s.mode = mode;
  s.mu = mu;
  s.lam = lam;
  s.theta1 = reduce_angle(theta1);
  s.theta2 = reduce_angle(theta2);
  s.form = form;
  s.branch = branch;
  if (mode.n == 0 && (form == EigenForm::product_cos || form == EigenForm::general ||
                      form == EigenForm::lemma)) {
    double amp_cos = std::cos(s.theta1);
    double amp_sin = form == EigenForm::lemma ? lam * std::sin(s.theta2) : lam * std::cos(s.theta2);
    if (form == EigenForm::product_cos) amp_sin = 0.0;
    if (mode.m == 0) amp_sin = 0.0;
    if (std::abs(amp_cos) < 1e-15 && std::abs(amp_sin) < 1e-15)
      fail(ErrorCode::InvalidArgument, "eigenfunction vanishes identically");
  }
  return s;
}

EigenfunctionSpec EigenfunctionSpec::to_general() const {
  if (form != EigenForm::lemma) return *this;
  EigenfunctionSpec s = *this;
  s.form = EigenForm::general;
  s.theta2 = reduce_angle(theta2 - kPi / 2.0);
  return s;
}

EigenfunctionSpec EigenfunctionSpec::translated(double x0, double y0) const {
  EigenfunctionSpec s = *this;
  s.shift_x += x0;
  s.shift_y += y0;
  return s;
}

Jet eval_jet(const EigenfunctionSpec& spec, const TorusGeometry& geom, double x, double y) {
  return jet_of(terms_of(spec, geom), wrap(x, geom.a()), wrap(y, geom.b()));
}

double eval(const EigenfunctionSpec& spec, const TorusGeometry& geom, double x, double y) {
  return eval_jet(spec, geom, x, y).u;
}

double sup_bound(const EigenfunctionSpec& spec) {
  double s = 0.0;
  for (const auto& t : terms_of(spec, TorusGeometry(1.0, 1.0))) s += std::abs(t.c);
  return s;
}

SignGrid sign_grid(const EigenfunctionSpec& spec, const TorusGeometry& geom, int nx, int ny) {
  if (nx < 4 || ny < 4) fail(ErrorCode::InvalidArgument, "sign grid needs nx, ny >= 4");
  const auto terms = terms_of(spec, geom);
  const double zero_level = 1e-12 * sup_bound(spec);
  SignGrid g{nx, ny, std::vector<std::int8_t>(static_cast<std::size_t>(nx) * ny), geom};
  const double hx = geom.a() / nx;
  const double hy = geom.b() / ny;
  for (int j = 0; j < ny; ++j) {
    const double y = (j + 0.5) * hy;
    for (int i = 0; i < nx; ++i) {
      const double u = jet_of(terms, (i + 0.5) * hx, y).u;
      std::int8_t s = 0;
      if (u > zero_level) s = 1;
      else if (u < -zero_level) s = -1;
      g.signs[static_cast<std::size_t>(j) * nx + i] = s;
    }
  }
  return g;
}

NodalLabels label_nodal_domains(const SignGrid& grid) {
  const int nx = grid.nx, ny = grid.ny;
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  DisjointSets sets(n);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(j) * nx + i;
      const auto s = grid.signs[c];
      if (s == 0) continue;
      const std::size_t right = static_cast<std::size_t>(j) * nx + (i + 1) % nx;
      const std::size_t up = static_cast<std::size_t>((j + 1) % ny) * nx + i;
      if (grid.signs[right] == s) sets.unite(c, right);
      if (grid.signs[up] == s) sets.unite(c, up);
    }
  }
  NodalLabels out;
  out.labels.assign(n, 0);
  std::vector<int> root_label(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    if (grid.signs[c] == 0) continue;
    const auto r = sets.find(c);
    if (root_label[r] == 0) root_label[r] = ++out.count;
    out.labels[c] = root_label[r];
  }
  return out;
}

int count_nodal_domains(const EigenfunctionSpec& spec, const TorusGeometry& geom, int nx, int ny) {
  constexpr int kCellsPerOscillation = 32;
  if (nx < kCellsPerOscillation * spec.mode.m || ny < kCellsPerOscillation * spec.mode.n) {
    std::ostringstream os;
    os << "resolution " << nx << "x" << ny << " below " << kCellsPerOscillation
       << " cells per oscillation for mode (" << spec.mode.m << "," << spec.mode.n << ")";
    fail(ErrorCode::InvalidArgument, os.str());
  }
  const int coarse = label_nodal_domains(sign_grid(spec, geom, nx, ny)).count;
  const int fine = label_nodal_domains(sign_grid(spec, geom, 2 * nx, 2 * ny)).count;
  if (coarse != fine) {
    std::ostringstream os;
    os << "nodal count changed from " << coarse << " to " << fine << " under refinement";
    fail(ErrorCode::ResolutionUnstable, os.str());
  }
  return coarse;
}

CriticalZeroSearch find_critical_zeros(const EigenfunctionSpec& spec, const TorusGeometry& geom,
                                       int seed_res) {
  const std::int64_t kmax = std::max<std::int64_t>({spec.mode.m, spec.mode.n, 1});
  if (seed_res < 32 * kmax) fail(ErrorCode::InvalidArgument, "seed_res must be >= 32 max(m,n,1)");
  const auto terms = terms_of(spec, geom);
  const double amp = sup_bound(spec);
  const double kx = 2.0 * kPi * static_cast<double>(spec.mode.m) / geom.a();
  const double ky = 2.0 * kPi * static_cast<double>(spec.mode.n) / geom.b();
  const double grad_scale = amp * std::max(kx + ky, 1e-300);
  const double ku = std::max(0.5 * (kx + ky), 1.0);  // weight of the u equation
  const int n = seed_res;
  const double hx = geom.a() / n;
  const double hy = geom.b() / n;

  // Normalized defect; small only near (approximate) critical zeros.
  std::vector<double> phi(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Jet jt = jet_of(terms, i * hx, j * hy);
      const double gu = jt.u / amp;
      const double gg = std::hypot(jt.ux, jt.uy) / grad_scale;
      phi[static_cast<std::size_t>(j) * n + i] = gu * gu + gg * gg;
    }
  }
  const double s = 4.0 * kPi * static_cast<double>(kmax) / n;
  const double seed_level = 2.0 * s * s;
  const double merge = (geom.a() + geom.b()) / (2.0 * n);

  CriticalZeroSearch out;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v = phi[static_cast<std::size_t>(j) * n + i];
      if (v > seed_level) continue;
      bool local_min = true;
      for (int dj = -1; dj <= 1 && local_min; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ii = (i + di + n) % n, jj = (j + dj + n) % n;
          const double w = phi[static_cast<std::size_t>(jj) * n + ii];
          // Ties broken by index so that flat minima yield one seed.
          if (w < v || (w == v && (jj * n + ii) < (j * n + i))) {
            local_min = false;
            break;
          }
        }
      }
      if (!local_min) continue;
      ++out.seeds;

      double x = i * hx, y = j * hy;
      double res = 0.0;
      double damping = 1e-12;
      for (int it = 0; it < 80; ++it) {
        const Jet jt = jet_of(terms, x, y);
        res = std::max({std::abs(jt.u), std::abs(jt.ux), std::abs(jt.uy)});
        if (res <= 0.1 * kCriticalResidual) break;
        const std::array<double, 3> f{ku * jt.u, jt.ux, jt.uy};
        const std::array<std::array<double, 2>, 3> jac{
            {{ku * jt.ux, ku * jt.uy}, {jt.uxx, jt.uxy}, {jt.uxy, jt.uyy}}};
        double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
        for (int r = 0; r < 3; ++r) {
          a11 += jac[r][0] * jac[r][0];
          a12 += jac[r][0] * jac[r][1];
          a22 += jac[r][1] * jac[r][1];
          g1 += jac[r][0] * f[r];
          g2 += jac[r][1] * f[r];
        }
        const double scale = std::max(a11 + a22, 1e-300);
        a11 += damping * scale;
        a22 += damping * scale;
        const double det = a11 * a22 - a12 * a12;
        if (!(std::abs(det) > 0.0)) break;
        double dx = -(a22 * g1 - a12 * g2) / det;
        double dy = -(a11 * g2 - a12 * g1) / det;
        // Keep steps within a few cells of the seed region.
        const double len = std::hypot(dx / hx, dy / hy);
        if (len > 2.0) {
          dx *= 2.0 / len;
          dy *= 2.0 / len;
        }
        x += dx;
        y += dy;
      }
      const Jet jt = jet_of(terms, x, y);
      res = std::max({std::abs(jt.u), std::abs(jt.ux), std::abs(jt.uy)});
      if (!(res <= kCriticalResidual)) {
        ++out.failed_seeds;
        continue;
      }
      x = wrap(x, geom.a());
      y = wrap(y, geom.b());
      bool duplicate = false;
      for (const auto& z : out.zeros) {
        double ddx = std::abs(z.x - x), ddy = std::abs(z.y - y);
        ddx = std::min(ddx, geom.a() - ddx);
        ddy = std::min(ddy, geom.b() - ddy);
        if (std::hypot(ddx, ddy) < merge) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) out.zeros.push_back({x, y, res});
    }
  }
  std::sort(out.zeros.begin(), out.zeros.end(), [](const CriticalZero& l, const CriticalZero& r) {
    return l.x != r.x ? l.x < r.x : l.y < r.y;
  });
  return out;
}

std::int64_t knot_components(std::int64_t p, std::int64_t q) {
  if (p < 0 || q < 0) fail(ErrorCode::InvalidArgument, "winding numbers must be non-negative");
  if (p == 0 && q == 0) fail(ErrorCode::DegenerateInput, "(p,q) = (0,0) has no curve");
  return std::gcd(p, q);
}

std::int64_t knot_components_traced(std::int64_t p, std::int64_t q) {
  if (p < 0 || q < 0) fail(ErrorCode::InvalidArgument, "winding numbers must be non-negative");
  if (p == 0 && q == 0) fail(ErrorCode::DegenerateInput, "(p,q) = (0,0) has no curve");
  // A degenerate rectangle is a segment of length p (or q); the lines meet it
  // in isolated integer points, each its own component after projection.
  if (q == 0 || p == 0) return std::max(p, q);
  // Lattice points (x,y) of R(p,q) taken mod (p,q); each lies on exactly one
  // projected line, and walking along a line steps (x,y) -> (x+1, y-1).
  std::vector<char> seen(static_cast<std::size_t>(p * q), 0);
  std::int64_t components = 0;
  for (std::int64_t x0 = 0; x0 < p; ++x0) {
    for (std::int64_t y0 = 0; y0 < q; ++y0) {
      if (seen[static_cast<std::size_t>(x0 * q + y0)]) continue;
      ++components;
      std::int64_t x = x0, y = y0;
      do {
        seen[static_cast<std::size_t>(x * q + y)] = 1;
        x = (x + 1) % p;
        y = (y - 1 + q) % q;
      } while (x != x0 || y != y0);
    }
  }
  return components;
}

void write_labels_pgm(std::ostream& os, int nx, int ny, const std::vector<int>& labels) {
  const int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
  os << "P5\n" << nx << ' ' << ny << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(nx));
  // Top image row is the largest y.
  for (int j = ny - 1; j >= 0; --j) {
    for (int i = 0; i < nx; ++i) {
      const int l = labels[static_cast<std::size_t>(j) * nx + i];
      int level = 0;
      if (l > 0) level = count <= 255 ? (l * 255) / std::max(count, 1) : 1 + (l - 1) % 255;
      row[static_cast<std::size_t>(i)] = static_cast<unsigned char>(level);
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

void write_labels_csv(std::ostream& os, int nx, int ny, const std::vector<int>& labels) {
  os << "cell,i,j,label\n";
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(j) * nx + i;
      os << c << ',' << i << ',' << j << ',' << labels[c] << '\n';
    }
  }
}

}  // namespace tpl
