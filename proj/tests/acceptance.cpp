// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, each against its
// stated tolerance and runtime budget. Exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tpl/eigensolver.hpp"
#include "tpl/error.hpp"
#include "tpl/nodal.hpp"
#include "tpl/optimizer.hpp"
#include "tpl/spectrum.hpp"
#include "tpl/topology.hpp"

using namespace tpl;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (passed) detail << "failed: ";
      else detail << "; ";
      detail << what;
      passed = false;
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<void(Outcome&)> body;
};

// Integer oracle for T(1, 2/5): lambda / pi^2 = 4 m^2 + 25 n^2.
struct KeyedMode {
  std::int64_t key, m, n;
};

std::map<std::int64_t, std::vector<KeyedMode>> keyed_box(std::int64_t cm, std::int64_t cn, int box) {
  std::map<std::int64_t, std::vector<KeyedMode>> groups;
  for (int m = 0; m <= box; ++m)
    for (int n = 0; n <= box; ++n) {
      const std::int64_t key = cm * m * m + cn * n * n;
      groups[key].push_back({key, m, n});
    }
  return groups;
}

std::int64_t oracle_multiplicity(const std::vector<KeyedMode>& modes) {
  std::int64_t s = 0;
  for (const auto& md : modes) s += (md.m > 0 ? 2 : 1) * (md.n > 0 ? 2 : 1);
  return s;
}

void spectrum_exactness(Outcome& o) {
  const TorusGeometry g(1, 0.4);
  const auto s = enumerate_spectrum(g, 12);
  o.require(s.exact, "rational mode not engaged");
  const auto groups = keyed_box(4, 25, 50);
  auto it = groups.begin();
  for (std::size_t i = 0; i < 12; ++i, ++it) {
    const auto& e = s.entries[i];
    const double expect = kPi2 * static_cast<double>(it->first);
    o.require(std::abs(e.value - expect) <= 4 * std::numeric_limits<double>::epsilon() * expect,
              "entry " + std::to_string(i + 1) + " value");
    o.require(e.multiplicity == oracle_multiplicity(it->second), "entry " + std::to_string(i + 1) + " multiplicity");
    o.require(e.modes.size() == it->second.size(), "entry " + std::to_string(i + 1) + " mode set");
    for (const auto& md : e.modes) o.require(4 * md.m * md.m + 25 * md.n * md.n == it->first, "mode key");
  }
  const auto rows = spectrum_rows(g, 4);
  o.require(rows[1].value == rows[2].value && rows[1].value / kPi2 == 4.0, "lambda_2 = lambda_3 = 4 pi^2");
  o.require(std::abs(rows[3].value / kPi2 - 16.0) < 1e-14, "lambda_4 = 16 pi^2");
  o.detail << "12 entries match the (m,n) <= 50 sort; lambda_4/pi^2 = " << rows[3].value / kPi2;
}

void covering_spectrum(Outcome& o) {
  // T(2, 1/2): lambda / pi^2 = l^2 + 16 m^2.
  const TorusGeometry g(2, 0.5);
  const auto groups = keyed_box(1, 16, 20);
  std::int64_t idx = 1, oracle_index = 0;
  for (const auto& [key, modes] : groups) {
    if (key == 9) oracle_index = idx;
    idx += oracle_multiplicity(modes);
  }
  const auto rows = spectrum_rows(g, 6);
  const auto& r = rows[5];
  o.require(oracle_index == 6, "oracle places 9 pi^2 at index 6");
  o.require(r.value == 9 * kPi2 || std::abs(r.value - 9 * kPi2) <= 4e-16 * r.value, "lambda_6 = 9 pi^2");
  o.require(r.mode == EigenIndex{3, 0}, "lambda_6 mode is (3,0)");
  o.require(r.courant_index == 6, "courant index 6");
  o.require(r.courant_sharp == Sharpness::yes, "Courant sharp");
  o.detail << "lambda_6/pi^2 = " << r.value / kPi2 << ", index " << r.courant_index << ", sharp "
           << to_string(r.courant_sharp);
}

void nodal_table(Outcome& o) {
  const TorusGeometry g(1, 0.61);
  int counted = 0;
  for (int m = 1; m <= 4; ++m) {
    for (int n = 0; n <= 4; ++n) {
      const int nx = 64 * m, ny = 64 * std::max(n, 1);
      const std::string tag = "(" + std::to_string(m) + "," + std::to_string(n) + ")";
      for (double lam : {-1.0, 0.5, 1.0}) {
        for (double t1 : {0.0, kPi / 4}) {
          const auto u = EigenfunctionSpec::make({m, n}, EigenForm::lemma, lam, t1, 0.0);
          const int expect = n == 0 ? 2 * m : 2 * std::gcd(m, n);
          o.require(count_nodal_domains(u, g, nx, ny) == expect, "lemma family " + tag);
          ++counted;
        }
        if (n == 0) continue;
        for (int branch : {1, -1}) {
          const auto p = EigenfunctionSpec::make({m, n}, EigenForm::product_sin, lam, 0, 0, 1, branch);
          o.require(count_nodal_domains(p, g, nx, ny) == 4 * m * n, "sine product " + tag);
          ++counted;
        }
      }
      if (n > 0) {
        for (double t1 : {0.0, kPi / 4}) {
          const auto c = EigenfunctionSpec::make({m, n}, EigenForm::product_cos, 0, t1);
          o.require(count_nodal_domains(c, g, nx, ny) == 4 * m * n, "cosine product " + tag);
          ++counted;
        }
      }
    }
  }
  o.detail << counted << " doubling-stable counts at (64m, 64n)";
}

double torus_distance(double x0, double y0, double x1, double y1, double a, double b) {
  double dx = std::fmod(std::abs(x0 - x1), a), dy = std::fmod(std::abs(y0 - y1), b);
  dx = std::min(dx, a - dx);
  dy = std::min(dy, b - dy);
  return std::hypot(dx, dy);
}

// Crossing points of the zero lines of a product f(x) g(y).
bool matches_crossings(const CriticalZeroSearch& found, const std::vector<double>& xs, const std::vector<double>& ys,
                       const TorusGeometry& g) {
  if (found.zeros.size() != xs.size() * ys.size()) return false;
  for (double x : xs)
    for (double y : ys) {
      int hits = 0;
      for (const auto& z : found.zeros)
        if (torus_distance(x, y, z.x, z.y, g.a(), g.b()) < 1e-8) ++hits;
      if (hits != 1) return false;
    }
  return true;
}

void critical_zero_lemma(Outcome& o) {
  const TorusGeometry g(1, 0.4);
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> mag(0.1, 2.0), ang(0.0, 2 * kPi);
  std::uniform_int_distribution<int> mode(1, 3);
  int empty = 0;
  for (int t = 0; t < 50; ++t) {
    const double lam = (rng() % 2 ? 1 : -1) * mag(rng);
    double theta = ang(rng);
    while (std::abs(std::cos(theta)) < 0.1) theta = ang(rng);
    const int m = mode(rng), n = mode(rng);
    const auto u = EigenfunctionSpec::make({m, n}, EigenForm::lemma, lam, theta, 0.0);
    const auto found = find_critical_zeros(u, g, 64 * std::max(m, n));
    if (found.zeros.empty()) ++empty;
  }
  o.require(empty == 50, std::to_string(50 - empty) + " generic draws had critical zeros");

  int branches = 0;
  for (auto [m, n] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{2, 3}}) {
    const int res = 64 * std::max(m, n);
    // lambda = 0: cos mX cos(nY + theta).
    const double theta = 0.3;
    std::vector<double> xs, ys;
    for (int i = 0; i < 2 * m; ++i) xs.push_back((kPi / 2 + i * kPi) / (2 * kPi * m) * g.a());
    for (int j = 0; j < 2 * n; ++j) {
      double y = (kPi / 2 + j * kPi - theta) / (2 * kPi * n) * g.b();
      ys.push_back(std::fmod(y + g.b(), g.b()));
    }
    const auto u0 = EigenfunctionSpec::make({m, n}, EigenForm::lemma, 0.0, theta, 0.0);
    o.require(matches_crossings(find_critical_zeros(u0, g, res), xs, ys, g), "lambda = 0 crossings");
    // cos theta = 0: sin nY (lambda sin mX - cos mX).
    const double lam = 0.7;
    xs.clear();
    ys.clear();
    for (int i = 0; i < 2 * m; ++i) xs.push_back((std::atan(1 / lam) + i * kPi) / (2 * kPi * m) * g.a());
    for (int j = 0; j < 2 * n; ++j) ys.push_back(j * kPi / (2 * kPi * n) * g.b());
    const auto u1 = EigenfunctionSpec::make({m, n}, EigenForm::lemma, lam, kPi / 2, 0.0);
    o.require(matches_crossings(find_critical_zeros(u1, g, res), xs, ys, g), "cos theta = 0 crossings");
    branches += 2;
  }
  o.detail << empty << "/50 generic draws free of critical zeros; " << branches
           << " degenerate branches match the line-crossing oracle";
}

void courant_exclusion(Outcome& o) {
  int pairs = 0;
  for (double b : {0.37, 0.61, 0.83}) {
    const TorusGeometry g(1, b);
    for (int m = 1; m <= 6; ++m)
      for (int n = 1; n <= 6; ++n) {
        const auto ci = courant_index(g, {m, n});
        o.require(ci >= courant_lower_bound({m, n}), "counting bound");
        o.require(is_courant_sharp(g, {m, n}) == Sharpness::no, "sharpness");
        ++pairs;
      }
  }
  o.detail << pairs << " pairs non-sharp with index >= 4mn+2m+2n-2";
}

void near_square_scan(Outcome& o) {
  const TorusGeometry g(1, 0.97);
  const auto rows = spectrum_rows(g, 40);
  std::vector<std::int64_t> sharp;
  for (const auto& r : rows) {
    o.require(r.courant_sharp != Sharpness::undetermined, "undetermined entry");
    if (r.courant_sharp == Sharpness::yes && r.index == r.courant_index) sharp.push_back(r.index);
  }
  o.require(sharp == std::vector<std::int64_t>{1, 2}, "sharp index set");
  o.detail << "sharp indices:";
  for (auto s : sharp) o.detail << ' ' << s;
}

void solver_accuracy(Outcome& o) {
  std::vector<ConvergenceSample> samples;
  for (int c : {64, 128, 256}) {
    const auto mask = rectangle_mask(TorusGeometry(2, 2), 2 * c, 2 * c, 0, 0, c, c);
    samples.push_back({1.0 / c, ground_energy(mask).energy});
  }
  const double rel = std::abs(samples.back().energy / (2 * kPi2) - 1);
  const double order = convergence_order(samples, 2 * kPi2);
  o.require(rel < 0.01, "energy at h = 1/256");
  o.require(order >= 1.8 && order <= 2.2, "convergence order");
  o.detail << "lambda/pi^2 = " << std::setprecision(8) << samples.back().energy / kPi2 << " (rel " << rel
           << "), order " << order;
}

void thin_torus_odd(Outcome& o) {
  const TorusGeometry g(1, 0.25);
  OptimizerConfig cfg;
  cfg.k = 3;
  cfg.nx = 128;
  cfg.ny = 32;
  cfg.restarts = 8;
  const auto r = optimize(g, cfg);
  const double target = 9 * kPi2;
  const double rel = r.energy.max_energy / target - 1;
  o.require(std::abs(rel) <= 0.05, "energy within 5% of 9 pi^2");
  const auto topo = analyze_topology(r.partition);
  for (const auto& d : topo.domains) {
    o.require(d.euler == 0, "domain chi != 0");
    o.require(d.winding && *d.winding == WindingPair{1, 0}, "winding != (1,0)");
  }
  o.require(topo.critical_points.empty(), "critical points present");
  o.require(check_euler_identity(r.partition) == 0, "Euler residual");
  const auto lifted = lift_partition(r.partition, 2, 2);
  o.require(lifted.k() == 6, "lift has " + std::to_string(lifted.k()) + " domains");
  o.require(is_bipartite(lifted), "lift not bipartite");
  o.detail << "Lambda/pi^2 = " << std::setprecision(6) << r.energy.max_energy / kPi2 << " (rel " << rel
           << "), chi all 0, X(N) empty, windings (1,0), lift 6 bipartite";
}

void thin_torus_even(Outcome& o) {
  const TorusGeometry g(1, 0.4);
  OptimizerConfig cfg;
  cfg.k = 4;
  cfg.nx = 128;
  cfg.ny = 48;
  const auto r = optimize(g, cfg);
  const double rel = r.energy.max_energy / (16 * kPi2) - 1;
  o.require(std::abs(rel) <= 0.05, "energy within 5% of 16 pi^2");
  o.require(is_bipartite(r.partition), "not bipartite");
  o.detail << "Lambda/pi^2 = " << std::setprecision(6) << r.energy.max_energy / kPi2 << " (rel " << rel
           << "), bipartite " << (is_bipartite(r.partition) ? "true" : "false");
}

// Orbit count of the closed line of slope q/p drawn on the p x q grid.
std::int64_t walk_components(int p, int q) {
  std::vector<char> seen(static_cast<std::size_t>(p * q), 0);
  std::int64_t comps = 0;
  for (int s = 0; s < p * q; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    ++comps;
    int x = s % p, y = s / p;
    while (!seen[static_cast<std::size_t>(y * p + x)]) {
      seen[static_cast<std::size_t>(y * p + x)] = 1;
      x = (x + 1) % p;
      y = (y + 1) % q;
    }
  }
  // Each component visits lcm(p,q) grid points; the count above is gcd.
  return comps;
}

void knots(Outcome& o) {
  for (int p = 1; p <= 12; ++p)
    for (int q = 1; q <= 12; ++q) {
      const auto g = knot_components(p, q);
      o.require(g == std::gcd(p, q), "gcd path");
      o.require(knot_components_traced(p, q) == g, "tracing path");
      o.require(walk_components(p, q) == g, "independent walk");
    }
  o.require(knot_components(3, 2) == 1 && knot_components(4, 2) == 2, "named examples");
  o.detail << "144 pairs agree; (3,2) -> " << knot_components(3, 2) << ", (4,2) -> " << knot_components(4, 2);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "spectrum exactness T(1,0.4)", 1, spectrum_exactness},
      {2, "covering spectrum T(2,0.5)", 1, covering_spectrum},
      {3, "nodal-count table", 120, nodal_table},
      {4, "critical-zero lemma", 60, critical_zero_lemma},
      {5, "Courant-sharp exclusion", 10, courant_exclusion},
      {6, "near-square scan b = 0.97", 5, near_square_scan},
      {7, "eigensolver accuracy", 120, solver_accuracy},
      {8, "thin torus k = 3", 900, thin_torus_odd},
      {9, "thin torus k = 4", 900, thin_torus_even},
      {10, "knot components", 1, knots},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      std::ostringstream os;
      os << "runtime " << secs << " s over budget " << c.budget_s << " s";
      o.require(false, os.str());
    }
    if (!o.passed) ++failures;
    std::cout << (o.passed ? "PASS" : "FAIL") << "  [" << std::setw(2) << c.id << "] " << c.name << "  ("
              << std::fixed << std::setprecision(2) << secs << " s)  " << std::defaultfloat << o.detail.str()
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
