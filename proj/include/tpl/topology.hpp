// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpl/partition.hpp"

namespace tpl {

/// k vertical strips, label(i,j) = 1 + floor(k i / nx); each strip wraps the
/// b-cycle. Throws IndivisibleResolution unless k divides nx.
GridPartition strip_partition(const TorusGeometry& geom, int k, int nx, int ny);

/// Euler characteristic V - E + F of the closed pixel complex of one label
/// class, with periodic identification. Two same-label cells meeting only at a
/// corner contribute that vertex once each, so the complex matches
/// 4-adjacency.
int euler_characteristic(const GridPartition& part, int label);

/// Grid vertex (i,j) is the lower-left corner of cell (i,j). Its valence is
/// the number of label changes met when walking the four surrounding cells
/// cyclically; points listed have valence 3 or 4.
struct CriticalPoint {
  int i = 0;
  int j = 0;
  int valence = 0;
  friend bool operator==(const CriticalPoint&, const CriticalPoint&) = default;
};
std::vector<CriticalPoint> critical_points(const GridPartition& part);

/// 2 * (sum_l chi(D_l) - sum_i (nu(x_i)/2 - 1)), an integer that vanishes for
/// every partition of the closed torus.
std::int64_t check_euler_identity(const GridPartition& part);

/// Homology class of a closed curve: p turns along the b-period, q turns along
/// the a-period, both non-negative. A vertical strip's core has (1,0).
struct WindingPair {
  std::int64_t p = 0;
  std::int64_t q = 0;
  friend bool operator==(const WindingPair&, const WindingPair&) = default;
};

/// Winding pair of each oriented boundary loop of the label class.
std::vector<WindingPair> boundary_windings(const GridPartition& part, int label);

/// Winding pair of an annular domain, read off one boundary loop. Throws
/// NotAnnular when chi != 0 and InvalidArgument for the single-domain torus.
WindingPair winding_pair(const GridPartition& part, int label);

struct AdjacencyGraph {
  int vertices = 0;                         // labels 1..vertices
  std::vector<std::pair<int, int>> edges;   // (l1, l2), l1 < l2, sorted
};
AdjacencyGraph adjacency_graph(const GridPartition& part);
bool is_bipartite(const AdjacencyGraph& graph);
bool is_bipartite(const GridPartition& part);

/// Pull-back to the covering T(fx a, fy b): the label field is tiled fx by fy
/// times and each connected component of a pulled-back class becomes a label.
GridPartition lift_partition(const GridPartition& part, int fx, int fy);

struct DomainInfo {
  int label = 0;
  std::size_t cells = 0;
  int euler = 0;
  std::optional<WindingPair> winding;
};

struct DomainTopology {
  std::vector<DomainInfo> domains;
  std::vector<CriticalPoint> critical_points;
  std::int64_t euler_residual_twice = 0;
  AdjacencyGraph graph;
  bool bipartite = false;
  // Diagnostic only: counts of boundary edges by orientation.
  std::size_t horizontal_boundary_edges = 0;
  std::size_t vertical_boundary_edges = 0;
};

DomainTopology analyze_topology(const GridPartition& part);

/// JSON report: per-domain chi and winding, critical points, residual,
/// bipartite flag, adjacency edges.
std::string topology_report_json(const DomainTopology& topo, int indent = 2);

}  // namespace tpl
