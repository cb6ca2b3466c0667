// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tpl/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tpl/error.hpp"
#include "tpl/parallel.hpp"
#include "tpl/spectrum.hpp"
#include "tpl/topology.hpp"

namespace tpl {

namespace {

using Labels = std::vector<int>;

std::array<std::size_t, 4> neighbors(std::size_t c, int nx, int ny) {
  const int i = static_cast<int>(c % nx), j = static_cast<int>(c / nx);
  return {static_cast<std::size_t>(j) * nx + (i + 1) % nx,
          static_cast<std::size_t>(j) * nx + (i + nx - 1) % nx,
          static_cast<std::size_t>((j + 1) % ny) * nx + i,
          static_cast<std::size_t>((j + ny - 1) % ny) * nx + i};
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Labels voronoi_labels(const TorusGeometry& geom, int nx, int ny, int k, std::mt19937_64& rng) {
  const double hx = geom.a() / nx, hy = geom.b() / ny;
  for (;;) {
    std::vector<std::pair<double, double>> seeds;
    for (int s = 0; s < k; ++s) seeds.emplace_back(uniform01(rng) * geom.a(), uniform01(rng) * geom.b());
    Labels labels(static_cast<std::size_t>(nx) * ny);
    std::vector<int> counts(static_cast<std::size_t>(k) + 1, 0);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double x = (i + 0.5) * hx, y = (j + 0.5) * hy;
        int best = 1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int s = 0; s < k; ++s) {
          double dx = std::abs(x - seeds[s].first), dy = std::abs(y - seeds[s].second);
          dx = std::min(dx, geom.a() - dx);
          dy = std::min(dy, geom.b() - dy);
          const double d = dx * dx + dy * dy;
          if (d < best_d) {
            best_d = d;
            best = s + 1;
          }
        }
        labels[static_cast<std::size_t>(j) * nx + i] = best;
        ++counts[static_cast<std::size_t>(best)];
      }
    }
    if (std::all_of(counts.begin() + 1, counts.end(), [](int c) { return c > 0; })) return labels;
  }
}

// Keeps the largest component of every label and hands each remaining
// fragment to the neighboring label sharing the most boundary edges with it.
void absorb_fragments(Labels& labels, int nx, int ny, int k) {
  bool any = false;
  for (int l = 1; l <= k; ++l) {
    auto comps = label_components(nx, ny, labels, l);
    if (comps.size() <= 1) continue;
    std::size_t keep = 0;
    for (std::size_t c = 1; c < comps.size(); ++c)
      if (comps[c].size() > comps[keep].size()) keep = c;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (c == keep) continue;
      for (auto cell : comps[c]) labels[cell] = 0;
      any = true;
    }
  }
  if (!any) return;
  for (auto& comp : label_components(nx, ny, labels, 0)) {
    std::map<int, int> shared;
    for (auto cell : comp)
      for (auto d : neighbors(cell, nx, ny))
        if (labels[d] > 0) ++shared[labels[d]];
    int target = 0, most = -1;
    for (auto [l, count] : shared) {
      if (count > most) {
        most = count;
        target = l;
      }
    }
    for (auto cell : comp) labels[cell] = target;
  }
}

struct DomainSolve {
  std::vector<GroundState> states;
  std::vector<double> energies;
};

DomainSolve solve_domains(const TorusGeometry& geom, int nx, int ny, int k, const Labels& labels,
                          const Labels* previous_labels, const std::vector<double>* previous_psi,
                          const SolverOptions& opts) {
  DomainSolve out;
  out.states.resize(static_cast<std::size_t>(k));
  out.energies.resize(static_cast<std::size_t>(k));
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t d) {
    const int label = static_cast<int>(d) + 1;
    const auto mask = label_mask(geom, nx, ny, labels, label);
    std::vector<double> start;
    if (previous_labels && previous_psi) {
      for (std::size_t c = 0; c < labels.size(); ++c) {
        if (labels[c] != label) continue;
        start.push_back((*previous_labels)[c] == label ? (*previous_psi)[c] : 0.0);
      }
    }
    out.states[d] = ground_energy(mask, start, opts);
    out.energies[d] = out.states[d].energy;
  });
  return out;
}

}  // namespace

void OptimizerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::InvalidArgument, what);
  };
  require(k >= 2, "k must be >= 2");
  require(nx >= 4 && ny >= 4, "nx, ny must be >= 4");
  require(static_cast<long>(k) <= static_cast<long>(nx) * ny, "k exceeds the number of cells");
  require(max_outer_iters >= 1, "max_outer_iters must be positive");
  require(reassign_damping > 0.0 && reassign_damping <= 1.0, "reassign_damping must lie in (0,1]");
  require(weight_step > 0.0, "weight_step must be positive");
  require(stop_changes >= 1, "stop_changes must be positive");
  require(restarts >= 1, "restarts must be positive");
  require(solver_tol > 0.0 && solver_tol <= 1e-2, "solver_tol must lie in (0, 1e-2]");
}

OptimizerConfig OptimizerConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "config must be a JSON object");
  OptimizerConfig c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& key = it.key();
      if (key == "k") c.k = it->get<int>();
      else if (key == "nx") c.nx = it->get<int>();
      else if (key == "ny") c.ny = it->get<int>();
      else if (key == "seed") c.seed = it->get<std::uint64_t>();
      else if (key == "max_outer_iters") c.max_outer_iters = it->get<int>();
      else if (key == "reassign_damping") c.reassign_damping = it->get<double>();
      else if (key == "weight_step") c.weight_step = it->get<double>();
      else if (key == "stop_changes") c.stop_changes = it->get<int>();
      else if (key == "restarts") c.restarts = it->get<int>();
      else if (key == "solver_tol") c.solver_tol = it->get<double>();
      else fail(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

std::string OptimizerConfig::to_json(int indent) const {
  nlohmann::json j{{"k", k},
                   {"nx", nx},
                   {"ny", ny},
                   {"seed", seed},
                   {"max_outer_iters", max_outer_iters},
                   {"reassign_damping", reassign_damping},
                   {"weight_step", weight_step},
                   {"stop_changes", stop_changes},
                   {"restarts", restarts},
                   {"solver_tol", solver_tol}};
  return j.dump(indent);
}

PartitionEnergy partition_energy(const GridPartition& part, const SolverOptions& opts) {
  if (part.k() < 2) fail(ErrorCode::InvalidArgument, "partition energy needs k >= 2");
  const auto solved = solve_domains(part.geometry(), part.nx(), part.ny(), part.k(), part.labels(),
                                    nullptr, nullptr, opts);
  PartitionEnergy e;
  e.per_domain = solved.energies;
  e.max_energy = *std::max_element(e.per_domain.begin(), e.per_domain.end());
  return e;
}

double upper_bound(const TorusGeometry& geom, int k) {
  const double longest = std::max(geom.a(), geom.b());
  return static_cast<double>(k) * k * kPi2 / (longest * longest);
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::changes: return "changes";
    case StopReason::cycle: return "cycle";
    default: return "iteration_cap";
  }
}

OptimizeResult optimize(const TorusGeometry& geom, const OptimizerConfig& cfg) {
  cfg.validate();
  const int nx = cfg.nx, ny = cfg.ny, k = cfg.k;
  SolverOptions opts;
  opts.tol = cfg.solver_tol;

  std::vector<TraceRow> trace;
  std::optional<Labels> best_labels;
  double best_energy = std::numeric_limits<double>::infinity();
  int best_restart = 0;
  std::vector<StopReason> reasons;

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(restart)};
    std::mt19937_64 rng(seq);
    Labels labels = voronoi_labels(geom, nx, ny, k, rng);
    absorb_fragments(labels, nx, ny, k);

    std::vector<double> weights(static_cast<std::size_t>(k), 1.0);
    Labels previous;
    std::vector<double> psi(labels.size(), 0.0);
    StopReason reason = StopReason::iteration_cap;

    for (int it = 0; it < cfg.max_outer_iters; ++it) {
      const auto solved = solve_domains(geom, nx, ny, k, labels, it > 0 ? &previous : nullptr,
                                        it > 0 ? &psi : nullptr, opts);
      const double energy = *std::max_element(solved.energies.begin(), solved.energies.end());
      if (energy < best_energy) {
        best_energy = energy;
        best_labels = labels;
        best_restart = restart;
      }

      // Cell values of each owner's ground state.
      std::fill(psi.begin(), psi.end(), 0.0);
      for (int d = 0; d < k; ++d) {
        const auto& st = solved.states[static_cast<std::size_t>(d)];
        for (std::size_t u = 0; u < st.cells.size(); ++u) psi[st.cells[u]] = st.vector[u];
      }

      const double mean =
          std::accumulate(solved.energies.begin(), solved.energies.end(), 0.0) / static_cast<double>(k);
      double log_sum = 0.0;
      for (int d = 0; d < k; ++d) {
        auto& w = weights[static_cast<std::size_t>(d)];
        w *= std::exp(cfg.weight_step * (solved.energies[static_cast<std::size_t>(d)] / mean - 1.0));
        log_sum += std::log(w);
      }
      const double norm = std::exp(log_sum / k);
      for (auto& w : weights) w /= norm;

      // Each cell may move to a neighboring domain whose collar extension
      // (mean of that domain's values on the adjacent cells) scores higher.
      Labels next = labels;
      int flips = 0;
      for (std::size_t c = 0; c < labels.size(); ++c) {
        const int own = labels[c];
        const double own_score = weights[static_cast<std::size_t>(own - 1)] * psi[c];
        std::array<double, 4> sum{};
        std::array<int, 4> cnt{}, lab{};
        int distinct = 0;
        for (auto d : neighbors(c, nx, ny)) {
          const int l = labels[d];
          if (l == own) continue;
          int slot = 0;
          while (slot < distinct && lab[slot] != l) ++slot;
          if (slot == distinct) lab[distinct++] = l;
          sum[slot] += psi[d];
          ++cnt[slot];
        }
        int winner = own;
        double win_score = own_score;
        for (int s = 0; s < distinct; ++s) {
          const double score =
              cfg.reassign_damping * weights[static_cast<std::size_t>(lab[s] - 1)] * sum[s] / cnt[s];
          if (score > win_score || (score == win_score && winner != own && lab[s] < winner)) {
            win_score = score;
            winner = lab[s];
          }
        }
        if (winner != own) {
          next[c] = winner;
          ++flips;
        }
      }
      // A domain may not vanish: undo its losses if it would.
      std::vector<int> counts(static_cast<std::size_t>(k) + 1, 0);
      for (int l : next) ++counts[static_cast<std::size_t>(l)];
      for (int l = 1; l <= k; ++l) {
        if (counts[static_cast<std::size_t>(l)] > 0) continue;
        for (std::size_t c = 0; c < labels.size(); ++c)
          if (labels[c] == l) next[c] = l;
      }
      absorb_fragments(next, nx, ny, k);

      trace.push_back({restart, it, energy, solved.energies, flips});
      const bool cycling = next == previous;
      previous = std::move(labels);
      labels = std::move(next);
      if (flips < cfg.stop_changes) {
        reason = StopReason::changes;
        break;
      }
      if (cycling) {
        reason = StopReason::cycle;
        break;
      }
    }
    reasons.push_back(reason);
  }

  GridPartition part(geom, nx, ny, k, std::move(*best_labels));
  SolverOptions clean;
  auto energy = partition_energy(part, clean);
  energy.target = upper_bound(geom, k);
  return OptimizeResult{std::move(part), std::move(energy), std::move(trace),
                        reasons[static_cast<std::size_t>(best_restart)] == StopReason::changes, best_restart,
                        reasons[static_cast<std::size_t>(best_restart)]};
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  const std::size_t k = trace.empty() ? 0 : trace.front().per_domain.size();
  os << "restart,iteration,max_energy,max_energy_over_pi2,flips";
  for (std::size_t d = 1; d <= k; ++d) os << ",lambda_" << d;
  os << '\n';
  std::ostringstream line;
  line << std::setprecision(12);
  for (const auto& r : trace) {
    line.str("");
    line << r.restart << ',' << r.iteration << ',' << r.max_energy << ',' << r.max_energy / kPi2 << ','
         << r.flips;
    for (double e : r.per_domain) line << ',' << e;
    line << '\n';
    os << line.str();
  }
}

std::string trace_json(const std::vector<TraceRow>& trace, int indent) {
  auto rows = nlohmann::json::array();
  for (const auto& r : trace) {
    rows.push_back({{"restart", r.restart},
                    {"iteration", r.iteration},
                    {"max_energy", r.max_energy},
                    {"max_energy_over_pi2", r.max_energy / kPi2},
                    {"per_domain", r.per_domain},
                    {"flips", r.flips}});
  }
  return rows.dump(indent);
}

double thin_threshold(int k) { return k % 2 == 0 ? 2.0 / k : 1.0 / k; }

bool ThinTorusReport::passed() const {
  return hypothesis_met && !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string ThinTorusReport::to_json(int indent) const {
  nlohmann::json j{{"b", b}, {"k", k}, {"hypothesis_met", hypothesis_met}, {"passed", passed()}};
  if (!refusal.empty()) j["refusal"] = refusal;
  if (energy) {
    j["energy"] = *energy;
    j["energy_over_pi2"] = *energy / kPi2;
  }
  auto& cs = j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) cs.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return j.dump(indent);
}

ThinTorusReport verify_thin_torus(const TorusGeometry& input, int k,
                                  const std::optional<OptimizerConfig>& user_cfg) {
  ThinTorusReport rep;
  rep.k = k;
  const auto norm = TorusGeometry::normalized(input.a(), input.b());
  const double b = norm.b() / norm.a();
  rep.b = b;
  if (k < 2) {
    rep.refusal = "InvalidArgument: k must be >= 2";
    return rep;
  }
  if (!(b < thin_threshold(k))) {
    std::ostringstream os;
    os << "HypothesisNotMet: b = " << b << " is not below b_k = " << thin_threshold(k) << " for k = " << k;
    rep.refusal = os.str();
    return rep;
  }
  rep.hypothesis_met = true;
  const TorusGeometry geom(1.0, b);
  const double target = static_cast<double>(k) * k * kPi2;

  auto check = [&rep](const std::string& name, auto&& body) {
    CheckResult c{name, false, ""};
    try {
      std::string detail;
      c.passed = body(detail);
      c.detail = detail;
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = e.what();
    }
    rep.checks.push_back(std::move(c));
  };

  OptimizerConfig cfg;
  if (user_cfg) cfg = *user_cfg;
  else {
    cfg.nx = 128;
    cfg.ny = std::max(8, static_cast<int>(std::lround(cfg.nx * b)));
  }
  cfg.k = k;

  std::optional<OptimizeResult> result;
  std::optional<DomainTopology> topo;
  check("optimize", [&](std::string& d) {
    result = optimize(geom, cfg);
    rep.energy = result->energy.max_energy;
    topo = analyze_topology(result->partition);
    d = std::string("stopped on ") + to_string(result->stop_reason) + ", best restart " +
        std::to_string(result->best_restart);
    return true;
  });
  if (!result) return rep;

  const auto& part = result->partition;
  check("energy_within_5pct_of_k2pi2", [&](std::string& d) {
    const double rel = std::abs(result->energy.max_energy - target) / target;
    std::ostringstream os;
    os << "Lambda/pi^2 = " << result->energy.max_energy / kPi2 << ", relative deviation " << rel;
    d = os.str();
    return rel <= 0.05;
  });
  check("no_disk_domain", [&](std::string& d) {
    int disks = 0;
    for (const auto& dom : topo->domains) disks += dom.euler == 1;
    d = std::to_string(disks) + " domains with chi = 1";
    return disks == 0;
  });
  check("all_domains_annular", [&](std::string& d) {
    int bad = 0;
    for (const auto& dom : topo->domains) bad += dom.euler != 0;
    d = std::to_string(bad) + " domains with chi != 0";
    return bad == 0;
  });
  check("no_critical_points", [&](std::string& d) {
    d = std::to_string(topo->critical_points.size()) + " critical points";
    return topo->critical_points.empty();
  });
  check("windings_all_1_0", [&](std::string& d) {
    int bad = 0;
    for (const auto& dom : topo->domains) bad += !(dom.winding && *dom.winding == WindingPair{1, 0});
    d = std::to_string(bad) + " domains without winding (1,0)";
    return bad == 0;
  });
  check("euler_identity", [&](std::string& d) {
    d = "twice residual " + std::to_string(topo->euler_residual_twice);
    return topo->euler_residual_twice == 0;
  });
  check("lift_2x2_bipartite_2k", [&](std::string& d) {
    const auto lifted = lift_partition(part, 2, 2);
    const bool bip = is_bipartite(lifted);
    d = std::to_string(lifted.k()) + " lifted domains, bipartite = " + (bip ? "true" : "false");
    return lifted.k() == 2 * k && bip;
  });
  if (k % 2 == 0) {
    check("bipartite", [&](std::string& d) {
      d = topo->bipartite ? "true" : "false";
      return topo->bipartite;
    });
    check("strip_mode_courant_sharp", [&](std::string& d) {
      const EigenIndex mode{k / 2, 0};
      const auto idx = courant_index(geom, mode);
      const auto sharp = is_courant_sharp(geom, mode);
      const double lam = eigenvalue(geom, mode);
      std::ostringstream os;
      os << "mode (" << k / 2 << ",0): index " << idx << ", sharp " << to_string(sharp)
         << ", lambda/pi^2 = " << lam / kPi2;
      d = os.str();
      return idx == k && sharp == Sharpness::yes && std::abs(lam - target) <= 1e-9 * target;
    });
  } else {
    check("cover_spectrum_courant_sharp", [&](std::string& d) {
      const auto cover = geom.covering(2, 2);
      const EigenIndex mode{k, 0};
      const auto idx = courant_index(cover, mode);
      const auto sharp = is_courant_sharp(cover, mode);
      const auto spec = enumerate_spectrum(cover, static_cast<std::size_t>(2 * k));
      double lam_2k = 0.0;
      for (const auto& e : spec.entries)
        if (e.first_index <= 2 * k && 2 * k < e.first_index + e.multiplicity) lam_2k = e.value;
      std::ostringstream os;
      os << "T(2," << cover.b() << "): lambda_" << 2 * k << "/pi^2 = " << lam_2k / kPi2 << ", mode (" << k
         << ",0) index " << idx << ", sharp " << to_string(sharp);
      d = os.str();
      return std::abs(lam_2k - target) <= 1e-9 * target && idx == 2 * k && sharp == Sharpness::yes;
    });
  }
  return rep;
}

}  // namespace tpl
