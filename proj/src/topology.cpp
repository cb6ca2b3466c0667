// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tpl/topology.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <deque>
#include <set>

#include <json.hpp>

#include "tpl/error.hpp"

namespace tpl {

namespace {

// Labels of the four cells around vertex (i,j) in cyclic order SW, SE, NE, NW.
std::array<int, 4> around(const GridPartition& p, int i, int j) {
  return {p.at(i - 1, j - 1), p.at(i, j - 1), p.at(i, j), p.at(i - 1, j)};
}

int label_changes(const std::array<int, 4>& c) {
  int changes = 0;
  for (int s = 0; s < 4; ++s) changes += c[s] != c[(s + 1) % 4];
  return changes;
}

// Directions: 0 = +x, 1 = +y, 2 = -x, 3 = -y.
constexpr std::array<int, 4> kDx{1, 0, -1, 0};
constexpr std::array<int, 4> kDy{0, 1, 0, -1};

// Oriented boundary edges of one label class, with the class on the left.
// Edge e = 4 * cell + face; faces 0 bottom, 1 right, 2 top, 3 left, and the
// face index equals the traversal direction.
class BoundaryWalker {
 public:
  BoundaryWalker(const GridPartition& part, int label) : part_(part), label_(label) {}

  bool inside(int i, int j) const { return part_.at(i, j) == label_; }

  bool is_edge(int i, int j, int face) const {
    if (!inside(i, j)) return false;
    switch (face) {
      case 0: return !inside(i, j - 1);
      case 1: return !inside(i + 1, j);
      case 2: return !inside(i, j + 1);
      default: return !inside(i - 1, j);
    }
  }

  // Outgoing edge leaving vertex (vx,vy) in direction d, or -1.
  long outgoing(int vx, int vy, int d) const {
    int ci = vx, cj = vy;
    switch (d) {
      case 0: break;
      case 1: ci = vx - 1; break;
      case 2: ci = vx - 1; cj = vy - 1; break;
      default: cj = vy - 1; break;
    }
    if (!is_edge(ci, cj, d)) return -1;
    return static_cast<long>(part_.index(ci, cj)) * 4 + d;
  }

  // Start vertex of a face edge of cell (i,j), in unwrapped coordinates.
  static std::pair<int, int> start_vertex(int i, int j, int face) {
    switch (face) {
      case 0: return {i, j};
      case 1: return {i + 1, j};
      case 2: return {i + 1, j + 1};
      default: return {i, j + 1};
    }
  }

  std::vector<WindingPair> loops() const {
    const int nx = part_.nx(), ny = part_.ny();
    std::vector<char> used(part_.cells() * 4, 0);
    std::vector<WindingPair> out;
    for (std::size_t c = 0; c < part_.cells(); ++c) {
      const int i = static_cast<int>(c % nx), j = static_cast<int>(c / nx);
      for (int f = 0; f < 4; ++f) {
        const long e0 = static_cast<long>(c) * 4 + f;
        if (used[static_cast<std::size_t>(e0)] || !is_edge(i, j, f)) continue;
        long dx = 0, dy = 0;
        long e = e0;
        auto [vx, vy] = start_vertex(i, j, f);
        do {
          used[static_cast<std::size_t>(e)] = 1;
          const int d = static_cast<int>(e % 4);
          dx += kDx[d];
          dy += kDy[d];
          vx += kDx[d];
          vy += kDy[d];
          long next = -1;
          // Left turn first keeps corner-touching cells on separate loops.
          for (int turn : {1, 0, 3}) {
            next = outgoing(vx, vy, (d + turn) % 4);
            if (next >= 0) break;
          }
          if (next < 0) fail(ErrorCode::InvalidPartition, "open boundary curve");
          e = next;
        } while (e != e0);
        if (dx % nx != 0 || dy % ny != 0)
          fail(ErrorCode::InvalidPartition, "boundary loop does not close on the torus");
        out.push_back({std::labs(dy / ny), std::labs(dx / nx)});
      }
    }
    return out;
  }

 private:
  const GridPartition& part_;
  int label_;
};

}  // namespace

GridPartition strip_partition(const TorusGeometry& geom, int k, int nx, int ny) {
  if (k < 1 || nx < 1 || ny < 1) fail(ErrorCode::InvalidArgument, "k, nx, ny must be positive");
  if (nx % k != 0)
    fail(ErrorCode::IndivisibleResolution,
         "nx = " + std::to_string(nx) + " is not divisible by k = " + std::to_string(k));
  std::vector<int> labels(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      labels[static_cast<std::size_t>(j) * nx + i] = 1 + static_cast<int>((static_cast<long>(k) * i) / nx);
  return GridPartition(geom, nx, ny, k, std::move(labels));
}

int euler_characteristic(const GridPartition& part, int label) {
  const int nx = part.nx(), ny = part.ny();
  long faces = 0, edges = 0, vertices = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const bool in = part.at(i, j) == label;
      faces += in;
      // Bottom edge of (i,j) and left edge of (i,j).
      edges += in || part.at(i, j - 1) == label;
      edges += in || part.at(i - 1, j) == label;
      // Vertex at the lower-left corner: one copy per cyclic run of label cells.
      const auto c = around(part, i, j);
      int members = 0, runs = 0;
      for (int s = 0; s < 4; ++s) {
        const bool here = c[s] == label;
        members += here;
        runs += here && c[(s + 3) % 4] != label;
      }
      vertices += members == 4 ? 1 : runs;
    }
  }
  return static_cast<int>(vertices - edges + faces);
}

std::vector<CriticalPoint> critical_points(const GridPartition& part) {
  std::vector<CriticalPoint> out;
  for (int j = 0; j < part.ny(); ++j) {
    for (int i = 0; i < part.nx(); ++i) {
      const int nu = label_changes(around(part, i, j));
      if (nu >= 3) out.push_back({i, j, nu});
    }
  }
  return out;
}

std::int64_t check_euler_identity(const GridPartition& part) {
  std::int64_t twice_chi = 0;
  for (int l = 1; l <= part.k(); ++l) twice_chi += 2 * euler_characteristic(part, l);
  std::int64_t twice_rhs = 0;
  for (const auto& cp : critical_points(part)) twice_rhs += cp.valence - 2;
  return twice_chi - twice_rhs;
}

std::vector<WindingPair> boundary_windings(const GridPartition& part, int label) {
  return BoundaryWalker(part, label).loops();
}

WindingPair winding_pair(const GridPartition& part, int label) {
  if (label < 1 || label > part.k()) fail(ErrorCode::InvalidArgument, "label not present");
  if (part.k() == 1) fail(ErrorCode::InvalidArgument, "the whole torus has no boundary");
  const int chi = euler_characteristic(part, label);
  if (chi != 0) fail(ErrorCode::NotAnnular, "label " + std::to_string(label) + " has chi = " + std::to_string(chi));
  const auto loops = boundary_windings(part, label);
  if (loops.empty()) fail(ErrorCode::InvalidPartition, "annular domain without boundary");
  return loops.front();
}

AdjacencyGraph adjacency_graph(const GridPartition& part) {
  std::set<std::pair<int, int>> edges;
  for (int j = 0; j < part.ny(); ++j) {
    for (int i = 0; i < part.nx(); ++i) {
      const int l = part.at(i, j);
      for (int other : {part.at(i + 1, j), part.at(i, j + 1)}) {
        if (other != l) edges.insert({std::min(l, other), std::max(l, other)});
      }
    }
  }
  return {part.k(), {edges.begin(), edges.end()}};
}

bool is_bipartite(const AdjacencyGraph& graph) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(graph.vertices) + 1);
  for (auto [u, v] : graph.edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  std::vector<int> color(adj.size(), -1);
  for (int s = 1; s <= graph.vertices; ++s) {
    if (color[static_cast<std::size_t>(s)] >= 0) continue;
    color[static_cast<std::size_t>(s)] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        auto& cv = color[static_cast<std::size_t>(v)];
        if (cv < 0) {
          cv = 1 - color[static_cast<std::size_t>(u)];
          queue.push_back(v);
        } else if (cv == color[static_cast<std::size_t>(u)]) {
          return false;
        }
      }
    }
  }
  return true;
}

bool is_bipartite(const GridPartition& part) { return is_bipartite(adjacency_graph(part)); }

GridPartition lift_partition(const GridPartition& part, int fx, int fy) {
  if (fx < 1 || fy < 1 || fx > 2 || fy > 2)
    fail(ErrorCode::InvalidArgument, "covering factors must be 1 or 2");
  const int nx = part.nx() * fx, ny = part.ny() * fy;
  std::vector<int> tiled(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) tiled[static_cast<std::size_t>(j) * nx + i] = part.at(i, j);
  return GridPartition::from_components(part.geometry().covering(fx, fy), nx, ny, tiled);
}

DomainTopology analyze_topology(const GridPartition& part) {
  DomainTopology t;
  for (int l = 1; l <= part.k(); ++l) {
    DomainInfo d;
    d.label = l;
    d.cells = part.cell_count(l);
    d.euler = euler_characteristic(part, l);
    if (d.euler == 0 && part.k() > 1) d.winding = winding_pair(part, l);
    t.domains.push_back(d);
  }
  t.critical_points = critical_points(part);
  t.euler_residual_twice = check_euler_identity(part);
  t.graph = adjacency_graph(part);
  t.bipartite = is_bipartite(t.graph);
  for (int j = 0; j < part.ny(); ++j) {
    for (int i = 0; i < part.nx(); ++i) {
      t.vertical_boundary_edges += part.at(i, j) != part.at(i - 1, j);
      t.horizontal_boundary_edges += part.at(i, j) != part.at(i, j - 1);
    }
  }
  return t;
}

std::string topology_report_json(const DomainTopology& topo, int indent) {
  nlohmann::json j;
  j["k"] = topo.domains.size();
  auto& doms = j["domains"] = nlohmann::json::array();
  for (const auto& d : topo.domains) {
    nlohmann::json e{{"label", d.label}, {"cells", d.cells}, {"euler", d.euler}};
    if (d.winding) e["winding"] = {d.winding->p, d.winding->q};
    else e["winding"] = nullptr;
    doms.push_back(e);
  }
  auto& cps = j["critical_points"] = nlohmann::json::array();
  for (const auto& c : topo.critical_points) cps.push_back({{"i", c.i}, {"j", c.j}, {"valence", c.valence}});
  j["euler_residual_twice"] = topo.euler_residual_twice;
  j["bipartite"] = topo.bipartite;
  auto& edges = j["adjacency"] = nlohmann::json::array();
  for (auto [u, v] : topo.graph.edges) edges.push_back({u, v});
  j["boundary_edges"] = {{"horizontal", topo.horizontal_boundary_edges},
                         {"vertical", topo.vertical_boundary_edges}};
  return j.dump(indent);
}

}  // namespace tpl
