// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tpl/eigensolver.hpp"
#include "tpl/partition.hpp"

namespace tpl {

struct OptimizerConfig {
  int k = 3;
  int nx = 128;
  int ny = 32;
  std::uint64_t seed = 1;
  int max_outer_iters = 200;
  // A neighboring domain must beat the owner's score after multiplying its
  // own score by this factor; 1 means plain argmax.
  double reassign_damping = 1.0;
  // Weights evolve as w_j <- w_j exp(weight_step (lambda_j / mean - 1)).
  double weight_step = 0.5;
  int stop_changes = 1;
  int restarts = 8;
  double solver_tol = 1e-7;

  /// Throws InvalidArgument on non-positive fields, k < 2, or k > nx*ny.
  void validate() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static OptimizerConfig from_json(const std::string& text);
  std::string to_json(int indent = 2) const;
};

struct PartitionEnergy {
  std::vector<double> per_domain;
  double max_energy = 0.0;
  std::optional<double> target;
};

/// Ground-state energy of every domain and their maximum. Requires k >= 2.
PartitionEnergy partition_energy(const GridPartition& part, const SolverOptions& opts = {});

/// k^2 pi^2 min(1/a^2, 1/b^2): energy of the k straight strips across the
/// longer period, an upper bound for the optimal partition energy.
double upper_bound(const TorusGeometry& geom, int k);

struct TraceRow {
  int restart = 0;
  int iteration = 0;
  double max_energy = 0.0;
  std::vector<double> per_domain;
  int flips = 0;
};

// Why a restart stopped: label flips fell below stop_changes, the labels
// entered a two-cycle (grid cannot resolve the balance point), or the
// iteration cap was reached.
enum class StopReason { changes, cycle, iteration_cap };
const char* to_string(StopReason r);

struct OptimizeResult {
  GridPartition partition;
  PartitionEnergy energy;  // re-evaluated on the returned labels
  std::vector<TraceRow> trace;
  bool converged = false;  // the restart that produced `partition` met stop_changes
  int best_restart = 0;
  StopReason stop_reason = StopReason::iteration_cap;  // of best_restart
};

/// Seeded Voronoi start, then repeated ground-state solves, weighted score
/// reassignment across domain interfaces, and fragment absorption; best
/// partition over all iterations and restarts is returned.
OptimizeResult optimize(const TorusGeometry& geom, const OptimizerConfig& cfg);

/// Header: restart,iteration,max_energy,max_energy_over_pi2,flips,lambda_1..lambda_k
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);
std::string trace_json(const std::vector<TraceRow>& trace, int indent = 2);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ThinTorusReport {
  double b = 0.0;
  int k = 0;
  bool hypothesis_met = false;
  std::string refusal;  // set when the hypothesis b < b_k fails
  std::vector<CheckResult> checks;
  std::optional<double> energy;
  bool passed() const;
  std::string to_json(int indent = 2) const;
};

/// Threshold b_k below which k straight strips are the expected optimum:
/// 2/k for even k, 1/k for odd k.
double thin_threshold(int k);

/// Composite certificate on T(1,b) for b < b_k: optimizer energy against
/// k^2 pi^2, domain topology, Euler identity, (2,2)-lift, and the Courant
/// sharpness of the strip eigenfunction (on T(2,2b) for odd k, on T(1,b) for
/// even k). Never throws; failures are recorded per check. T(a,b) is
/// normalized and scaled to a = 1 first.
ThinTorusReport verify_thin_torus(const TorusGeometry& geom, int k,
                                  const std::optional<OptimizerConfig>& cfg = std::nullopt);

}  // namespace tpl
